#include "oracles.hpp"

#include <sftrec/gwrecon.hpp>

#include <gtest/gtest.h>

#include <functional>

using namespace sftrec;

namespace {

CorrelatorKey point_key(const std::vector<int>& levels)
{
    std::vector<Insertion> ins;
    for (int a : levels) ins.push_back({0, a});
    return CorrelatorKey(ins, {});
}

void expect_all_zero(const GradedSeries& s, const std::string& what)
{
    EXPECT_TRUE(s.is_zero()) << what << ": " << s.to_string();
}

// Every descendant position and every pair of other positions must give the stored value.
int check_choice_independence(Reconstructor& r)
{
    int checked = 0;
    for (const auto& key : r.enumerate_keys()) {
        Rational v = r.value(key);
        std::size_t n = key.insertions.size();
        for (std::size_t d = 0; d < n; ++d) {
            if (key.insertions[d].level == 0) continue;
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = b + 1; c < n; ++c) {
                    if (b == d || c == d) continue;
                    EXPECT_EQ(r.trr_split(key, d, b, c), v) << describe(r.model(), key) << " desc " << d;
                    ++checked;
                }
        }
    }
    return checked;
}

} // namespace

TEST(Invert, RoundTrip)
{
    RationalMatrix m{{Rational(2), Rational(1)}, {Rational(1), Rational(1)}};
    auto inv = invert(m);
    ASSERT_TRUE(inv);
    EXPECT_EQ((*inv)[0][0], 1);
    EXPECT_EQ((*inv)[0][1], -1);
    EXPECT_EQ((*inv)[1][1], 2);
    EXPECT_FALSE(invert({{Rational(1), Rational(2)}, {Rational(2), Rational(4)}}));
}

TEST(PointTarget, MatchesClosedFormAndStringOracle)
{
    ReconstructionBounds b{8, 5, 0};
    auto table = reconstruct(TargetModel::point(), b);
    int nonzero = 0;
    std::vector<int> levels;
    std::function<void(int)> all = [&](int lo) {
        if (levels.size() >= 3) {
            Rational v = table.value(point_key(levels));
            EXPECT_EQ(v, oracle::point_closed_form(levels));
            EXPECT_EQ(v, oracle::point_by_string(levels));
            nonzero += v != 0;
        }
        if (levels.size() == 8) return;
        for (int a = lo; a <= b.max_level; ++a) {
            levels.push_back(a);
            all(a);
            levels.pop_back();
        }
    };
    all(0);
    EXPECT_EQ(nonzero, static_cast<int>(table.entries().size()));
    EXPECT_GT(nonzero, 15);
    EXPECT_EQ(table.value(point_key({1, 0, 0, 0})), 1);
    EXPECT_EQ(table.value(point_key({2, 0, 0, 0, 0})), 1);
    EXPECT_EQ(table.value(point_key({1, 1, 0, 0, 0})), 2);
    EXPECT_EQ(table.value(point_key({3, 3, 0, 0, 0, 0, 0, 0, 0})), 0);  // outside bounds ⇒ absent
}

TEST(PointTarget, ChoiceIndependence)
{
    Reconstructor r(TargetModel::point(), {7, 4, 0});
    EXPECT_GT(check_choice_independence(r), 100);
}

TEST(PointTarget, BoundsEnforced)
{
    Reconstructor r(TargetModel::point(), {5, 2, 0});
    EXPECT_THROW(r.value(point_key({0, 0, 0, 0, 0, 0})), BoundOverflow);
    EXPECT_THROW(r.value(point_key({3, 0, 0, 0, 0, 0})), BoundOverflow);
    EXPECT_EQ(r.value(point_key({0, 0})), 0);
}

TEST(PointTarget, PotentialEquations)
{
    ReconstructionBounds b{7, 4, 0};
    auto model = TargetModel::point();
    PotentialSpace space(model, b.max_level);
    auto f = assemble_potential(reconstruct(model, b), space);
    EXPECT_FALSE(f.is_zero());
    for (int i = 1; i <= b.max_level; ++i) {
        for (int j = 0; j <= 2; ++j)
            for (int k = 0; k <= 2; ++k)
                expect_all_zero(verify_trr(f, space, b, {0, i}, {0, j}, {0, k}), "trr");
        expect_all_zero(verify_averaged_trr(f, space, b, {0, i}), "averaged trr");
    }
    auto sdd = verify_string_dilaton_divisor(f, space, b);
    expect_all_zero(sdd.string, "string");
    expect_all_zero(sdd.dilaton, "dilaton");
    EXPECT_FALSE(sdd.divisor);

    StringDilatonDivisorOptions flipped;
    flipped.standard_dilaton_sign = false;
    EXPECT_FALSE(verify_string_dilaton_divisor(f, space, b, flipped).dilaton.is_zero());
    StringDilatonDivisorOptions unit_factor;
    unit_factor.quadratic_factor = 1;
    EXPECT_FALSE(verify_string_dilaton_divisor(f, space, b, unit_factor).string.is_zero());
}

TEST(PointTarget, FaultInjectionIsDetected)
{
    ReconstructionBounds b{7, 4, 0};
    auto model = TargetModel::point();
    auto table = reconstruct(model, b);
    table.set(point_key({1, 1, 0, 0, 0}), 3);
    PotentialSpace space(model, b.max_level);
    auto f = assemble_potential(table, space);
    EXPECT_FALSE(verify_averaged_trr(f, space, b, {0, 1}).is_zero());
    EXPECT_FALSE(verify_trr(f, space, b, {0, 1}, {0, 0}, {0, 0}).is_zero());
    EXPECT_FALSE(verify_string_dilaton_divisor(f, space, b).string.is_zero());
}

TEST(ToyModel, ValuesAndChoiceIndependence)
{
    ReconstructionBounds b{6, 3, 2};
    Reconstructor r(TargetModel::p1_toy(), b);
    // ⟨e e e e⟩_1 = ⟨e e e⟩_1 by the divisor equation
    EXPECT_EQ(r.value(CorrelatorKey({{1, 0}, {1, 0}, {1, 0}, {1, 0}}, {1})), 1);
    EXPECT_EQ(r.value(CorrelatorKey({{0, 0}, {0, 0}, {1, 0}}, {0})), 1);
    EXPECT_EQ(r.value(CorrelatorKey({{0, 0}, {1, 0}, {1, 0}}, {1})), 0);
    EXPECT_EQ(r.value(CorrelatorKey({{1, 0}, {1, 0}, {1, 0}}, {0})), 0);
    EXPECT_GT(check_choice_independence(r), 50);
}

TEST(ToyModel, PotentialEquationsAndQuantumProduct)
{
    ReconstructionBounds b{6, 3, 2};
    auto model = TargetModel::p1_toy();
    PotentialSpace space(model, b.max_level);
    auto f = assemble_potential(reconstruct(model, b), space);
    for (int a = 0; a < 2; ++a)
        for (int i = 1; i <= b.max_level; ++i) {
            expect_all_zero(verify_averaged_trr(f, space, b, {a, i}), "averaged trr");
            for (int c1 = 0; c1 < 2; ++c1)
                for (int c2 = 0; c2 < 2; ++c2)
                    expect_all_zero(verify_trr(f, space, b, {a, i}, {c1, 0}, {c2, 1}), "trr");
        }
    auto sdd = verify_string_dilaton_divisor(f, space, b);
    expect_all_zero(sdd.string, "string");
    expect_all_zero(sdd.dilaton, "dilaton");
    ASSERT_TRUE(sdd.divisor);
    expect_all_zero(*sdd.divisor, "divisor");
    // descendant terms at d > 0 need the two-point descendants dropped by the recursion
    StringDilatonDivisorOptions full;
    full.divisor_descendants_positive_degree = true;
    EXPECT_FALSE(verify_string_dilaton_divisor(f, space, b, full).divisor->is_zero());

    auto c = quantum_product(f, space);
    // unit axiom: 1 * θ = θ
    for (int a = 0; a < 2; ++a)
        for (int nu = 0; nu < 2; ++nu) {
            auto expected = GradedSeries::constant(space.table(), a == nu ? 1 : 0, c[0][a][nu].truncation());
            EXPECT_EQ(c[0][a][nu], expected);
        }
    // e * e = z · 1
    auto z = GradedSeries::variable(space.table(), space.z(0), c[1][1][0].truncation());
    EXPECT_EQ(c[1][1][0], z);
    EXPECT_TRUE(c[1][1][1].is_zero());
    for (const auto& r : wdvv_residuals(c, space)) expect_all_zero(r, "wdvv");
}

TEST(TargetModelValidation, RejectsBadInput)
{
    auto m = TargetModel::p1_toy();
    m.eta = {{Rational(1), Rational(0)}, {Rational(0), Rational(0)}};
    try {
        m.validate();
        FAIL() << "singular eta accepted";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("eta"), std::string::npos);
    }
    auto bad_primary = TargetModel::p1_toy();
    bad_primary.primaries.push_back({{1, 1, 1}, {2}, Rational(5)});
    EXPECT_THROW(bad_primary.validate(), InvalidInput);
    auto bad_unit = TargetModel::p1_toy();
    bad_unit.primaries[0].value = 2;
    EXPECT_THROW(bad_unit.validate(), InvalidInput);
    auto derived = TargetModel::p1_toy();
    derived.primaries.push_back({{1, 1, 1, 1}, {1}, Rational(1)});
    EXPECT_THROW(derived.validate(), InvalidInput);
    auto odd = TargetModel::point();
    odd.basis[0].degree = 1;
    EXPECT_THROW(Reconstructor(odd, {}), InvalidInput);
}

TEST(TargetModelValidation, MissingPrimaryReported)
{
    auto m = TargetModel::p1_toy();
    m.primaries.pop_back();
    m.primary_max_degree = 0;
    Reconstructor r(m, {4, 1, 2});
    EXPECT_THROW(r.value(CorrelatorKey({{1, 0}, {1, 0}, {1, 0}}, {1})), MissingPrimary);
}
