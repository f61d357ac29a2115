#include <sftrec/cylhom.hpp>

#include <gtest/gtest.h>

using namespace sftrec;

namespace {

ChainComplexData two_orbits(std::vector<CountEntry> entries)
{
    ChainComplexData d;
    d.name = "small";
    d.model = TargetModel::point();
    d.bounds = {5, 1, 0};
    d.orbits.orbits = {{"a", 3, 1, true}, {"b", 2, 1, true}};
    d.counts.entries = std::move(entries);
    return d;
}

const FloerModel& point_model(SectionChoice label)
{
    static std::map<SectionChoice, FloerModel> cache;
    auto it = cache.find(label);
    if (it == cache.end()) it = cache.emplace(label, build_floer_model(TargetModel::point(), 2, {6, 2, 0}, label)).first;
    return it->second;
}

const FloerModel& toy_model(SectionChoice label)
{
    static std::map<SectionChoice, FloerModel> cache;
    auto it = cache.find(label);
    if (it == cache.end()) it = cache.emplace(label, build_floer_model(TargetModel::p1_toy(), 1, {5, 2, 1}, label)).first;
    return it->second;
}

std::vector<std::size_t> range(std::size_t from, std::size_t to)
{
    std::vector<std::size_t> out;
    for (auto k = from; k < to; ++k) out.push_back(k);
    return out;
}

bool same(const LinearChainMap& a, const LinearChainMap& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (!(a.at(r, c) == b.at(r, c))) return false;
    return true;
}

} // namespace

TEST(Cylhom, GeneratorsAndReadOff)
{
    auto d = two_orbits({});
    d.orbits.orbits.push_back({"x", 5, 2, false});
    EXPECT_EQ(generators(d.orbits).size(), 2u);
    d.orbits.equivariant = false;
    auto g = generators(d.orbits);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_EQ(g[0].id, "a.hat");
    EXPECT_EQ(g[2].id, "a.check");
    EXPECT_EQ(g[2].degree, 4);

    EXPECT_TRUE(ChainComplex(two_orbits({})).differential().is_zero());
    ChainComplex cx(two_orbits({{"a", "b", {}, {}, Rational(1)}}));
    const auto& dd = cx.differential();
    EXPECT_EQ(dd.at(cx.index("b"), cx.index("a")).to_string(), "1");
    EXPECT_EQ(dd.nonzero_entries().size(), 1u);
}

TEST(Cylhom, Validation)
{
    auto d = two_orbits({{"a", "b", {{0, 0, true}}, {}, Rational(1)}});
    EXPECT_THROW(d.validate(), InvalidInput);
    d = two_orbits({{"a", "x", {}, {}, Rational(1)}});
    d.orbits.orbits.push_back({"x", 2, 2, false});
    try {
        d.validate();
        FAIL();
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("bad orbit"), std::string::npos);
    }
    d = two_orbits({{"a", "c", {}, {}, Rational(1)}});
    EXPECT_THROW(d.validate(), InvalidInput);
    d = two_orbits({{"a", "b", {{0, 4, false}}, {}, Rational(1)}});
    EXPECT_THROW(d.validate(), InvalidInput);
}

TEST(Cylhom, DSquared)
{
    EXPECT_TRUE(verify_d_squared(ChainComplex(two_orbits({}))).zero());
    EXPECT_TRUE(verify_d_squared(ChainComplex(two_orbits({{"a", "b", {}, {}, Rational(1)}}))).zero());

    auto d = two_orbits({{"a", "b", {}, {}, Rational(1)}, {"b", "c", {}, {}, Rational(2)}});
    d.orbits.orbits.push_back({"c", 1, 1, true});
    auto rep = verify_d_squared(ChainComplex(d));
    ASSERT_EQ(rep.offending.size(), 1u);
    EXPECT_EQ(rep.offending[0], std::make_pair(std::string("a"), std::string("c")));

    for (auto label : {SectionChoice::TwoZero, SectionChoice::ZeroTwo}) {
        EXPECT_TRUE(verify_d_squared(ChainComplex(point_model(label).floer)).zero());
        EXPECT_TRUE(verify_d_squared(ChainComplex(point_model(label).cylinder)).zero());
    }
    EXPECT_TRUE(verify_d_squared(ChainComplex(toy_model(SectionChoice::TwoZero).floer)).zero());
    EXPECT_TRUE(verify_d_squared(ChainComplex(toy_model(SectionChoice::TwoZero).cylinder)).zero());
}

TEST(Cylhom, Homology)
{
    auto h0 = Homology(ChainComplex(two_orbits({})));
    EXPECT_EQ(h0.total(), 2);
    EXPECT_EQ(h0.betti().at(3), 1);

    auto h1 = Homology(ChainComplex(two_orbits({{"a", "b", {}, {}, Rational(1)}})));
    EXPECT_EQ(h1.total(), 0);

    Homology hp(ChainComplex(point_model(SectionChoice::TwoZero).floer));
    EXPECT_EQ(hp.total(), 4);  // two periods
    EXPECT_EQ(hp.betti().at(0), 2);
    EXPECT_EQ(hp.betti().at(1), 2);

    auto bad = two_orbits({{"a", "b", {}, {}, Rational(1)}, {"b", "c", {}, {}, Rational(1)}});
    bad.orbits.orbits.push_back({"c", 1, 1, true});
    EXPECT_THROW(Homology(ChainComplex(bad)), InvalidInput);

    // contact fixture: a→b kills b, leaves e
    ChainComplex cx(contact_fixture());
    Homology hc(cx);
    EXPECT_EQ(hc.total(), 1);
    EXPECT_EQ(hc.betti().at(3), 1);
}

TEST(Cylhom, FloerBlocks)
{
    ChainComplex fl(point_model(SectionChoice::TwoZero).floer);
    auto eq = split_blocks(fl);
    EXPECT_TRUE(eq.split.is_zero());

    ChainComplex cy(toy_model(SectionChoice::TwoZero).cylinder);
    auto blocks = split_blocks(cy);
    auto tc = cy.t_like_variables();
    EXPECT_TRUE(set_zero(blocks.split, cy.wedge_variables()).map_entries(
        [&](const GradedSeries& s) {
            std::vector<VarId> checks;
            for (VarId v = 0; v < cy.space().table()->size(); ++v)
                if (cy.space().table()->kind(v) == VarKind::TCheck) checks.push_back(v);
            return set_zero(s, checks);
        },
        0).is_zero());
    EXPECT_FALSE(blocks.split.is_zero());

    // ∂_{α̌₁} has no diagonal part
    std::size_t n = cy.generators().size() / 2;
    auto hats = range(0, n);
    for (int a = 2; a < 4; ++a)
        for (int p = 0; p <= 2; ++p) EXPECT_TRUE(cy.decorated_check(a, p).block(hats, hats).is_zero());

    auto broken = toy_model(SectionChoice::TwoZero).floer;
    broken.counts.entries.push_back({"k1_1.check", "k1_1.hat", {}, {0}, Rational(1)});
    EXPECT_THROW(split_blocks(ChainComplex(broken)), NonSplitData);
}

TEST(Cylhom, NonEquivariantPointModel)
{
    for (auto label : {SectionChoice::TwoZero, SectionChoice::OneOne, SectionChoice::ZeroTwo}) {
        ChainComplex cx(point_model(label).floer);
        for (const auto& chk : verify_noneq_trr(cx)) EXPECT_TRUE(chk.passed) << chk.detail;
    }
    ChainComplex cx(point_model(SectionChoice::ZeroTwo).floer);
    TrrOptions literal;
    literal.sphere_bubble = false;
    EXPECT_FALSE(noneq_trr_residual(cx, SectionChoice::ZeroTwo, {0, 1}, literal).is_zero());
    literal.pair = PairOrdering::Literal;
    EXPECT_FALSE(noneq_trr_residual(cx, SectionChoice::ZeroTwo, {0, 1}, literal).is_zero());
    TrrOptions swapped;
    swapped.pair = PairOrdering::Literal;
    EXPECT_FALSE(noneq_trr_residual(cx, SectionChoice::ZeroTwo, {0, 1}, swapped).is_zero());
}

TEST(Cylhom, NonEquivariantToyModel)
{
    for (auto label : {SectionChoice::TwoZero, SectionChoice::OneOne, SectionChoice::ZeroTwo}) {
        ChainComplex cx(toy_model(label).floer);
        for (const auto& chk : verify_noneq_trr(cx)) EXPECT_TRUE(chk.passed) << chk.detail;
    }
}

TEST(Cylhom, LabelsAndFaults)
{
    ChainComplex two(point_model(SectionChoice::TwoZero).floer);
    EXPECT_THROW(noneq_trr_residual(two, SectionChoice::OneOne, {0, 1}), InvalidLabel);
    EXPECT_THROW(equiv_trr_residual(ChainComplex(point_model(SectionChoice::TwoZero).cylinder), SectionChoice::ZeroTwo,
                                    {1, 1}),
                 InvalidLabel);

    auto zero = point_model(SectionChoice::OneOne).floer;
    zero.counts.entries.clear();
    ChainComplex z(zero);
    for (const auto& chk : verify_noneq_trr(z)) EXPECT_TRUE(chk.passed);

    auto data = point_model(SectionChoice::TwoZero).floer;
    for (auto& e : data.counts.entries)
        if (e.insertions.size() == 2 && e.insertions[0].level == 1) {
            e.value += 1;
            break;
        }
    bool caught = false;
    for (const auto& chk : verify_noneq_trr(ChainComplex(data))) caught = caught || !chk.passed;
    EXPECT_TRUE(caught);
}

TEST(Cylhom, EquivariantMatchesFloer)
{
    for (auto label : {SectionChoice::TwoZero, SectionChoice::OneOne, SectionChoice::ZeroTwo}) {
        const auto& fm = toy_model(label);
        ChainComplex fl(fm.floer), cy(fm.cylinder);
        std::size_t n = fl.generators().size() / 2;
        for (int a = 0; a < 2; ++a)
            for (int i = 1; i <= 2; ++i) {
                auto r = noneq_trr_residual(fl, label, {a, i});
                auto e = rebase(equiv_trr_residual(cy, label, {2 + a, i}), fl.space().table());
                EXPECT_TRUE(same(r.block(range(0, n), range(0, n)), e));
                EXPECT_TRUE(same(r.block(range(n, 2 * n), range(n, 2 * n)), e));
                EXPECT_TRUE(e.is_zero());
            }
        TrrOptions literal;
        literal.sphere_bubble = false;
        if (label == SectionChoice::ZeroTwo) {
            auto r = noneq_trr_residual(fl, label, {1, 1}, literal);
            auto e = rebase(equiv_trr_residual(cy, label, {3, 1}, literal), fl.space().table());
            EXPECT_FALSE(e.is_zero());
            EXPECT_TRUE(same(r.block(range(0, n), range(0, n)), e));
        }
    }
    auto zero = toy_model(SectionChoice::OneOne).cylinder;
    zero.counts.entries.clear();
    EXPECT_TRUE(equiv_trr_residual(ChainComplex(zero), SectionChoice::OneOne, {2, 1}).is_zero());
}

TEST(Cylhom, GenericDataOnHomology)
{
    ChainComplex cx(generic_fixture());
    auto checks = verify_noneq_trr(cx);
    ASSERT_FALSE(checks.empty());
    EXPECT_FALSE(checks[0].chain_level);
    EXPECT_GT(checks[0].nonzero, 0u);
    for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.detail;
    EXPECT_THROW(noneq_trr_residual(cx, SectionChoice::TwoZero, {0, 1}), InvalidLabel);

    auto bad = generic_fixture();
    bad.counts.entries.push_back({"e.hat", "e.hat", {{0, 1, true}}, {}, Rational(1)});
    ChainComplex bx(bad);
    ASSERT_TRUE(verify_d_squared(bx).zero());
    EXPECT_FALSE(verify_noneq_trr(bx)[0].passed);
}

TEST(Cylhom, ContactVanishing)
{
    ChainComplex cx(contact_fixture());
    EXPECT_FALSE(cx.at_zero(cx.decorated(0, 1)).is_zero());
    auto rep = verify_contact_vanishing(cx);
    EXPECT_FALSE(rep.skipped);
    ASSERT_EQ(rep.entries.size(), 2u);
    EXPECT_EQ(rep.entries[0].insertion.level, 1);
    EXPECT_TRUE(rep.passed());

    auto flat = contact_fixture();
    flat.contact = false;
    auto skipped = verify_contact_vanishing(ChainComplex(flat));
    EXPECT_TRUE(skipped.skipped);
    EXPECT_FALSE(skipped.reason.empty());

    auto wrong = contact_fixture();
    wrong.orbits.orbits.push_back({"c", 2, 1, true});
    wrong.counts.entries.push_back({"e", "c", {{0, 1, false}}, {}, Rational(1)});
    EXPECT_FALSE(verify_contact_vanishing(ChainComplex(wrong)).passed());
}

TEST(Cylhom, QuantumAction)
{
    ChainComplex pt(point_model(SectionChoice::OneOne).floer);
    Homology hp(pt);
    auto rep = quantum_action(pt, hp);
    EXPECT_EQ(rep.checks.size(), 8u);
    EXPECT_TRUE(rep.passed());

    ChainComplex toy(toy_model(SectionChoice::OneOne).floer);
    auto rt = quantum_action(toy, Homology(toy));
    EXPECT_TRUE(rt.passed());

    auto data = toy_model(SectionChoice::OneOne).floer;
    for (auto& e : data.counts.entries)
        if (e.insertions.front() == CountInsertion{1, 0, true}) e.value *= 2;
    ChainComplex broken(data);
    auto rb = quantum_action(broken, Homology(broken));
    EXPECT_FALSE(rb.passed());
}

TEST(Cylhom, RationalFunctionsAndRank)
{
    ChainComplex cx(toy_model(SectionChoice::TwoZero).floer);
    auto table = cx.space().table();
    RationalFunction z(GradedSeries::variable(table, cx.space().z(0)));
    RationalFunction one(GradedSeries::constant(table, 1));
    auto q = one / z;
    EXPECT_TRUE(q * z == one);
    EXPECT_TRUE((q - q).is_zero());
    RFMatrix m{{z, one}, {one, q}};
    EXPECT_EQ(rank(m), 1u);
    RFMatrix full{{z, one}, {one, z}};
    EXPECT_EQ(rank(full), 2u);
    auto ker = kernel_basis(m, {0, 1}, 2);
    ASSERT_EQ(ker.size(), 1u);
    auto img = apply_matrix(m, ker[0]);
    EXPECT_TRUE(img[0].is_zero() && img[1].is_zero());
}
