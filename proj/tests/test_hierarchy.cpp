#include <sftrec/brackets.hpp>
#include <sftrec/hierarchy.hpp>

#include <gtest/gtest.h>

#include <map>

using namespace sftrec;

namespace {

// Commuting polynomials in u_{±1..±N}; exponent vector indexed by n + N.
struct Poly {
    int N;
    std::map<std::vector<int>, Rational> terms;

    Poly operator*(const Poly& o) const
    {
        Poly r{N, {}};
        for (const auto& [a, x] : terms)
            for (const auto& [b, y] : o.terms) {
                auto e = a;
                for (std::size_t k = 0; k < e.size(); ++k) e[k] += b[k];
                r.terms[e] += x * y;
            }
        std::erase_if(r.terms, [](const auto& kv) { return kv.second == 0; });
        return r;
    }
};

// g_j as the x⁰ coefficient of (Σ u_n xⁿ)^{j+2}/(j+2)!, indices |n| ≤ K
Poly oracle_hamiltonian(int j, int K, int N)
{
    std::map<int, Poly> power{{0, Poly{N, {{std::vector<int>(2 * N + 1, 0), Rational(1)}}}}};
    for (int step = 0; step < j + 2; ++step) {
        std::map<int, Poly> next;
        for (const auto& [w, p] : power)
            for (int n = -K; n <= K; ++n) {
                if (n == 0) continue;
                std::vector<int> e(2 * N + 1, 0);
                e[static_cast<std::size_t>(n + N)] = 1;
                auto& slot = next.try_emplace(w + n, Poly{N, {}}).first->second;
                for (const auto& [m, c] : (p * Poly{N, {{e, Rational(1)}}}).terms) slot.terms[m] += c;
            }
        power = std::move(next);
    }
    Poly out = power.count(0) ? power[0] : Poly{N, {}};
    for (auto& [m, c] : out.terms) c /= factorial(static_cast<unsigned>(j + 2));
    return out;
}

GradedSeries to_series(const Poly& p, const OrbitLattice& lat)
{
    GradedSeries s(lat.table());
    for (const auto& [e, c] : p.terms) {
        Monomial m;
        for (int n = -p.N; n <= p.N; ++n)
            if (int k = e[static_cast<std::size_t>(n + p.N)]) m.factors.emplace_back(lat.u(n), k);
        std::sort(m.factors.begin(), m.factors.end());
        s.add_term(m, c);
    }
    return s;
}

GradedSeries u(const OrbitLattice& lat, int n)
{
    return GradedSeries::variable(lat.table(), lat.u(n));
}

} // namespace

TEST(Circle, SmallExamples)
{
    OrbitLattice lat(3);
    auto q1 = u(lat, 1), p1 = u(lat, -1), q2 = u(lat, 2), p2 = u(lat, -2);
    EXPECT_EQ(build_circle_hamiltonian(0, lat, {1}), q1 * p1);
    EXPECT_TRUE(build_circle_hamiltonian(1, lat, {1}).is_zero());
    EXPECT_EQ(build_circle_hamiltonian(1, lat, {2}), Rational(1, 2) * (q1 * q1 * p2) + Rational(1, 2) * (p1 * p1 * q2));
    EXPECT_EQ(build_circle_hamiltonian(2, lat, {1}), Rational(1, 4) * (q1 * q1 * p1 * p1));
}

TEST(Circle, AgreesWithGeneratingFunctionOracle)
{
    OrbitLattice lat(4);
    for (int j = 0; j <= 3; ++j)
        for (int K = 1; K <= 4; ++K)
            EXPECT_EQ(build_circle_hamiltonian(j, lat, {K}), to_series(oracle_hamiltonian(j, K, 4), lat))
                << "j=" << j << " K=" << K;
}

TEST(Circle, ContractionCompleteAddsOneOuterIndex)
{
    OrbitLattice lat(8);
    auto full = build_circle_hamiltonian(2, lat, {2, TupleRange::ContractionComplete});
    auto naive = build_circle_hamiltonian(2, lat, {2});
    auto oracle = to_series(oracle_hamiltonian(2, 6, 8), lat);
    TruncationPolicy cut;
    cut.max_cover = 2;
    EXPECT_EQ(truncate(full, cut), naive);
    for (const auto& [m, c] : full.terms()) {
        int outer = 0;
        for (auto [v, e] : m.factors)
            if (lat.table()->cover(v) > 2) outer += e;
        EXPECT_LE(outer, 1);
        EXPECT_EQ(oracle.coefficient(m), c);
    }
}

TEST(Circle, WindingIsZero)
{
    OrbitLattice lat(4);
    for (int j = 0; j <= 3; ++j) {
        auto g = build_circle_hamiltonian(j, lat, {4});
        for (const auto& [m, c] : g.terms()) EXPECT_EQ(lat.winding(m), 0);
    }
}

TEST(Circle, ParallelMatchesSerial)
{
    OrbitLattice lat(12);
    for (int j = 0; j <= 2; ++j)
        EXPECT_EQ(build_circle_hamiltonian(j, lat, {4, TupleRange::ContractionComplete, 1}),
                  build_circle_hamiltonian(j, lat, {4, TupleRange::ContractionComplete, 4}));
}

TEST(Commuting, SmallBracketsVanish)
{
    OrbitLattice lat(3);
    auto g0 = build_circle_hamiltonian(0, lat, {3});
    auto g1 = build_circle_hamiltonian(1, lat, {3});
    EXPECT_TRUE(poisson_bracket(g0, g0).is_zero());
    EXPECT_TRUE(poisson_bracket(g0, g1).is_zero());
}

TEST(Commuting, ExactTruncationVanishesAtK6)
{
    auto check = check_circle_commuting(3, 6, 4);
    for (int i = 0; i <= 3; ++i)
        for (int k = 0; k <= 3; ++k) EXPECT_TRUE(check.exact[i][k].is_zero()) << i << "," << k;
    EXPECT_TRUE(check.exact_zero());
}

TEST(Commuting, NaiveTruncationDoesNot)
{
    auto check = check_circle_commuting(2, 2);
    EXPECT_TRUE(check.exact_zero());
    EXPECT_FALSE(check.naive[1][2].is_zero());
}

TEST(Commuting, AgreesWithOracleBracket)
{
    // full bracket of oracle series over a wide range, cut to K, equals the exact check
    int K = 2, N = 8;
    OrbitLattice lat(N);
    auto a = to_series(oracle_hamiltonian(1, N, N), lat);
    auto b = to_series(oracle_hamiltonian(2, N, N), lat);
    TruncationPolicy cut;
    cut.max_cover = K;
    EXPECT_TRUE(truncate(poisson_bracket(a, b), cut).is_zero());
}

TEST(Geodesic, ReducesToCircle)
{
    OrbitLattice lat(4);
    SignProfile signs;
    for (int j = 0; j <= 3; ++j)
        EXPECT_EQ(build_geodesic_hamiltonian(j, lat, signs, {3}), build_circle_hamiltonian(j, lat, {3}));
}

TEST(Geodesic, BadOrbitAndFilters)
{
    OrbitLattice lat(3);
    SignProfile bad;
    bad.bad_covers = {2};
    auto g = build_geodesic_hamiltonian(2, lat, bad, {3});
    EXPECT_FALSE(g.is_zero());
    for (const auto& [m, c] : g.terms())
        for (auto [v, e] : m.factors) EXPECT_NE(lat.table()->cover(v), 2);

    GradingProfile shifted;
    shifted.q_degree = {{1, 4}};
    OrbitLattice lat2(3, shifted);
    for (int j = 0; j <= 2; ++j) {
        auto h = build_geodesic_hamiltonian(j, lat2, {}, {3});
        for (const auto& [m, c] : h.terms()) EXPECT_EQ(monomial_degree(*lat2.table(), m), 2 * (5 + j - 3));
    }

    GradingProfile none;
    none.half_dim = 6;
    none.default_q_degree = 3;
    OrbitLattice lat3(2, none);
    EXPECT_TRUE(build_geodesic_hamiltonian(1, lat3, {}, {2}).is_zero());
}

TEST(Geodesic, SignProfileDomain)
{
    OrbitLattice lat(2);
    SignProfile partial;
    partial.default_sign.reset();
    partial.tuples = {{{1, -1}, 1}};
    EXPECT_THROW(build_geodesic_hamiltonian(0, lat, partial, {1}), InvalidInput);
    partial.tuples[{-1, 1}] = -1;
    EXPECT_TRUE(build_geodesic_hamiltonian(0, lat, partial, {1}).is_zero());
    SignProfile wrong;
    wrong.tuples = {{{1, -1}, 0}};
    EXPECT_THROW(wrong.validate(), InvalidInput);
}
