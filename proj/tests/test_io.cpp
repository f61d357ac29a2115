#include <sftrec/io.hpp>
#include <sftrec/suites.hpp>

#include <gtest/gtest.h>

using namespace sftrec;

namespace {

const std::filesystem::path kData = SFTREC_DATA_DIR;

std::string error_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Io, Rationals)
{
    EXPECT_EQ(io::rational_json(make_rational(-2, 6)), "-1/3");
    EXPECT_EQ(io::rational_json(Rational(4)), "4");
    EXPECT_EQ(io::rational_from("6/4", "x"), make_rational(3, 2));
    EXPECT_EQ(io::rational_from(7, "x"), 7);
    EXPECT_NE(error_of([] { io::rational_from("1/0", "a.b"); }).find("a.b"), std::string::npos);
    EXPECT_NE(error_of([] { io::rational_from(1.5, "a.c"); }).find("a.c"), std::string::npos);
}

TEST(Io, ShippedPointModel)
{
    auto m = io::load_model(kData / "point.model.json");
    auto p = TargetModel::point();
    EXPECT_EQ(m.name, p.name);
    EXPECT_EQ(m.dim, 0);
    ASSERT_EQ(m.basis.size(), 1u);
    EXPECT_EQ(m.eta, p.eta);
    EXPECT_EQ(io::to_json(m), io::to_json(p));

    auto toy = io::load_model(kData / "wdvv_toy.model.json");
    EXPECT_EQ(io::to_json(toy), io::to_json(TargetModel::p1_toy()));
    EXPECT_EQ(reconstruct(toy, {5, 2, 1}).entries(), reconstruct(TargetModel::p1_toy(), {5, 2, 1}).entries());
}

TEST(Io, SingularEtaRejected)
{
    auto j = io::to_json(TargetModel::p1_toy());
    j["eta"] = io::Json::array({io::Json::array({"0", "0"}), io::Json::array({"0", "0"})});
    EXPECT_NE(error_of([&] { io::model_from_json(j); }).find("eta not invertible"), std::string::npos);
}

TEST(Io, ModelFieldErrorsNamePaths)
{
    auto j = io::to_json(TargetModel::p1_toy());
    j["unit"] = "nope";
    EXPECT_NE(error_of([&] { io::model_from_json(j); }).find("model.unit"), std::string::npos);
    j = io::to_json(TargetModel::p1_toy());
    j["basis"][1].erase("degree");
    EXPECT_NE(error_of([&] { io::model_from_json(j); }).find("model.basis[1].degree"), std::string::npos);
    j = io::to_json(TargetModel::p1_toy());
    j["schema"] = "sftrec.model/9";
    EXPECT_NE(error_of([&] { io::model_from_json(j); }).find("schema"), std::string::npos);
}

TEST(Io, CountsRoundTripAndValidation)
{
    for (const char* f : {"floer_point.s11.counts.json", "cylinder_point.s02.counts.json", "contact.counts.json",
                          "generic.counts.json"}) {
        auto d = io::load_counts(kData / f);
        EXPECT_EQ(io::to_json(io::counts_from_json(io::to_json(d))), io::to_json(d)) << f;
    }
    auto fm = build_floer_model(TargetModel::point(), 2, {6, 2, 0}, SectionChoice::OneOne);
    EXPECT_EQ(io::to_json(io::load_counts(kData / "floer_point.s11.counts.json")), io::to_json(fm.floer));

    auto j = io::to_json(contact_fixture());
    j["entries"][0]["insertions"] = {{{"class", "1"}, {"level", 0}, {"constrained", true}}};
    EXPECT_NE(error_of([&] { io::counts_from_json(j); }).find("constrained"), std::string::npos);

    j = io::to_json(contact_fixture());
    j["label"] = "(3,0)";
    EXPECT_NE(error_of([&] { io::counts_from_json(j); }).find("counts.label"), std::string::npos);

    j = io::to_json(contact_fixture());
    j["entries"][0]["insertions"] = {{{"class", "zz"}, {"level", 0}}};
    EXPECT_NE(error_of([&] { io::counts_from_json(j); }).find("entries[0].insertions[0].class"), std::string::npos);
}

TEST(Io, ProfilesRoundTrip)
{
    io::Profiles p;
    p.max_cover = 4;
    p.grading.q_degree[2] = 3;
    p.signs.default_sign = std::nullopt;
    p.signs.tuples[{1, -1}] = -1;
    p.signs.bad_covers = {2};
    auto back = io::profiles_from_json(io::to_json(p));
    EXPECT_EQ(back.max_cover, 4);
    EXPECT_EQ(back.grading.q(2), 3);
    EXPECT_FALSE(back.signs.default_sign);
    EXPECT_EQ(back.signs.tuples, p.signs.tuples);
    EXPECT_EQ(back.signs.bad_covers, p.signs.bad_covers);

    auto shipped = io::load_profiles(kData / "circle.profile.json");
    EXPECT_EQ(shipped.max_cover, 6);
    EXPECT_EQ(shipped.signs.default_sign, 1);

    auto j = io::to_json(p);
    j["grading"]["q_degree"] = {{"two", 1}};
    EXPECT_NE(error_of([&] { io::profiles_from_json(j); }).find("q_degree"), std::string::npos);
}

TEST(Io, LedgerRoundTrip)
{
    auto shipped = io::load_ledger(kData / "m05.ledger.json");
    EXPECT_EQ(io::to_json(shipped), io::to_json(m05_ledger()));
    EXPECT_TRUE(perturbation_ledger_check(shipped).ok());

    auto j = io::to_json(m05_ledger());
    j["entries"][0]["target"] = io::Json::array({3, 3});
    EXPECT_NE(error_of([&] { io::ledger_from_json(j); }).find("entries[0].target"), std::string::npos);
}

TEST(Io, FilesAndSeries)
{
    EXPECT_NE(error_of([] { io::read_file("/nonexistent/x.json"); }).find("cannot open"), std::string::npos);
    auto tmp = std::filesystem::temp_directory_path() / "sftrec_io_test.json";
    io::write_file(tmp, io::Json{{"schema", "x"}});
    EXPECT_EQ(io::read_file(tmp)["schema"], "x");
    std::filesystem::remove(tmp);

    auto model = TargetModel::point();
    auto table = reconstruct(model, {5, 2, 0});
    auto j = io::to_json(table, model);
    EXPECT_EQ(j["schema"], io::kCorrelatorSchema);
    EXPECT_EQ(j["entries"].size(), table.entries().size());

    PotentialSpace space(model, 2);
    auto f = assemble_potential(table, space);
    auto s = io::to_json(f);
    EXPECT_EQ(s.size(), f.size());
    EXPECT_EQ(s[0][1], "1/6");
}
