#pragma once

#include <sftrec/series.hpp>

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace sftrec {

// Degree of q_n per cover; p_n gets 2(m−3) − deg q_n. Covers not listed use default_q_degree.
struct GradingProfile {
    int half_dim = 5;
    int default_q_degree = 2;
    std::map<int, int> q_degree;

    int q(int n) const;
    int p(int n) const { return hbar_degree(half_dim) - q(n); }
};

// ε per ordered index tuple. Tuples not listed use default_sign; without a default they are an error.
struct SignProfile {
    std::optional<int> default_sign = 1;
    std::map<std::vector<int>, int> tuples;
    std::set<int> bad_covers;

    int sign(const std::vector<int>& tuple) const;
    void validate() const;
};

// q_n, p_n for n = 1..max_cover, multiplicity n; u_n = q_n, u_{−n} = p_n.
class OrbitLattice
{
public:
    explicit OrbitLattice(int max_cover, GradingProfile grading = {});

    const TablePtr& table() const { return table_; }
    int max_cover() const { return max_cover_; }
    const GradingProfile& grading() const { return grading_; }
    VarId u(int n) const;
    // Σ of signed indices over a monomial
    int winding(const Monomial& m) const;

private:
    int max_cover_;
    GradingProfile grading_;
    TablePtr table_;
};

enum class TupleRange {
    Truncated,           // every |nᵢ| ≤ K
    ContractionComplete, // at most one |nᵢ| > K
};

struct HamiltonianOptions {
    int K = 1;
    TupleRange range = TupleRange::Truncated;
    int jobs = 1;
};

// Σ over ordered tuples (n₁,…,n_{j+2}), nᵢ ≠ 0, Σnᵢ = 0, of u_{n₁}⋯u_{n_{j+2}}/(j+2)!.
GradedSeries build_circle_hamiltonian(int j, const OrbitLattice& lattice, const HamiltonianOptions& options);

// Same sum weighted by ε(n⃗), keeping only monomials of degree 2(m+j−3).
GradedSeries build_geodesic_hamiltonian(int j, const OrbitLattice& lattice, const SignProfile& signs,
                                        const HamiltonianOptions& options);

// residual[i][k] = {h_i, h_k}
std::vector<std::vector<GradedSeries>> verify_pairwise_commuting(const std::vector<GradedSeries>& hams);

struct CommutingCheck {
    int K = 0;
    int max_level = 0;
    // {g_i, g_k} truncated to covers ≤ K, from contraction-complete Hamiltonians (exact)
    std::vector<std::vector<GradedSeries>> exact;
    // {g_i, g_k} of the naively truncated Hamiltonians
    std::vector<std::vector<GradedSeries>> naive;

    bool exact_zero() const;
};

// Lattice large enough for contraction-complete tuples: (max_level + 1)·K covers.
CommutingCheck check_circle_commuting(int max_level, int K, int jobs = 1);

} // namespace sftrec
