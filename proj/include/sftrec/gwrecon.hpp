#pragma once

#include <sftrec/series.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sftrec {

using RationalMatrix = std::vector<std::vector<Rational>>;

// Exact inverse; nullopt if singular.
std::optional<RationalMatrix> invert(const RationalMatrix& m);

struct BasisClass {
    std::string id;
    int degree = 0;
};

struct Insertion {
    int cls = 0;
    int level = 0;
    auto operator<=>(const Insertion&) const = default;
};

struct CorrelatorKey {
    std::vector<Insertion> insertions;  // sorted
    std::vector<int> degree;            // curve class over the H2 basis

    CorrelatorKey() = default;
    CorrelatorKey(std::vector<Insertion> ins, std::vector<int> d);

    int points() const { return static_cast<int>(insertions.size()); }
    int total_degree() const;
    auto operator<=>(const CorrelatorKey&) const = default;
};

struct PrimaryValue {
    std::vector<int> classes;
    std::vector<int> degree;
    Rational value;
};

struct TargetModel {
    std::string name;
    int dim = 0;  // real dimension
    std::vector<BasisClass> basis;
    int unit = 0;
    std::optional<int> divisor;
    RationalMatrix eta;
    std::vector<int> chern;                // c1 per H2 basis class
    std::vector<Rational> divisor_pairing; // D·A_k
    RationalMatrix divisor_cup;            // θ_D ∪ θ_α = Σ_β divisor_cup[α][β] θ_β
    std::vector<PrimaryValue> primaries;
    int primary_max_points = 3;  // primaries are complete (absent ⇒ 0) up to these bounds
    int primary_max_degree = 0;

    int h2_rank() const { return static_cast<int>(chern.size()); }
    int class_index(const std::string& id) const;

    // Checks every invariant; throws InvalidInput naming the offending field.
    void validate() const;
    const RationalMatrix& eta_inverse() const;

    // Σ(deg θ + 2a) = dim − 6 + 2n + 2 c1·d
    bool passes_dimension(const CorrelatorKey& key) const;

    static TargetModel point();
    // Two classes {1, e}, dim 2, η off-diagonal, ⟨e e e⟩_1 = 1, c1 = 2, e·A = 1.
    static TargetModel p1_toy();

private:
    mutable std::optional<RationalMatrix> eta_inv_;
};

struct MissingPrimary : Error {
    explicit MissingPrimary(const std::string& key) : Error("missing primary value for " + key) {}
};

struct BoundOverflow : Error {
    using Error::Error;
};

struct ReconstructionBounds {
    int max_points = 6;
    int max_level = 3;
    int max_degree = 0;  // total curve degree
};

std::string describe(const TargetModel& model, const CorrelatorKey& key);

class CorrelatorTable
{
public:
    CorrelatorTable(ReconstructionBounds bounds, int h2_rank) : bounds_(bounds), h2_rank_(h2_rank) {}

    Rational value(const CorrelatorKey& key) const;
    void set(const CorrelatorKey& key, const Rational& v);
    const std::map<CorrelatorKey, Rational>& entries() const { return entries_; }
    const ReconstructionBounds& bounds() const { return bounds_; }
    int h2_rank() const { return h2_rank_; }
    bool within_bounds(const CorrelatorKey& key) const;

private:
    ReconstructionBounds bounds_;
    int h2_rank_;
    std::map<CorrelatorKey, Rational> entries_;
};

// Memoized recursion: descendants by TRR (highest-level insertion stripped, β,γ the two smallest others),
// unit insertions by the string equation, divisor insertions (n ≥ 4) by the divisor equation,
// remaining primaries from the model; fewer than 3 insertions give 0.
class Reconstructor
{
public:
    Reconstructor(TargetModel model, ReconstructionBounds bounds);

    Rational value(const CorrelatorKey& key);
    // One TRR evaluation with a prescribed descendant position and pair (b, c) of other positions.
    Rational trr_split(const CorrelatorKey& key, std::size_t desc, std::size_t b, std::size_t c);
    CorrelatorTable table();

    const TargetModel& model() const { return model_; }
    const ReconstructionBounds& bounds() const { return bounds_; }

    // All keys within bounds that pass the dimension filter, in canonical order.
    std::vector<CorrelatorKey> enumerate_keys() const;

private:
    Rational primary(const CorrelatorKey& key);
    Rational compute(const CorrelatorKey& key);

    TargetModel model_;
    ReconstructionBounds bounds_;
    std::map<CorrelatorKey, Rational> memo_;
    std::map<std::pair<std::vector<int>, std::vector<int>>, Rational> primaries_;
};

CorrelatorTable reconstruct(const TargetModel& model, const ReconstructionBounds& bounds);

// Variables t^{α,j} (α in basis, j ≤ max_level) and z_k for a target model.
class PotentialSpace
{
public:
    // With tcheck_shift set, constrained variables ť^{α,j} of degree |t^{α,j}| + shift are declared first.
    PotentialSpace(const TargetModel& model, int max_level, std::optional<int> tcheck_shift = std::nullopt);

    const TablePtr& table() const { return table_; }
    VarId t(int cls, int level) const;
    std::optional<VarId> tcheck(int cls, int level) const;
    VarId z(int k) const { return z_.at(static_cast<std::size_t>(k)); }
    int max_level() const { return max_level_; }
    const TargetModel& model() const { return model_; }
    std::vector<VarId> t_variables() const;

    GradedSeries tvar(int cls, int level, TruncationPolicy trunc = {}) const
    {
        return GradedSeries::variable(table_, t(cls, level), trunc);
    }
    // Derivative by t^{cls,level}; zero if the level is outside the space.
    GradedSeries dt(const GradedSeries& f, int cls, int level) const;

private:
    TargetModel model_;
    int max_level_;
    TablePtr table_;
    std::vector<std::vector<VarId>> t_;
    std::vector<std::vector<VarId>> tc_;
    std::vector<VarId> z_;
};

TruncationPolicy potential_truncation(const ReconstructionBounds& bounds);

// 𝕗 = Σ value · t^{α₁,a₁}⋯t^{α_r,a_r} z^d / Aut.
GradedSeries assemble_potential(const CorrelatorTable& table, const PotentialSpace& space);

// ∂³𝕗/∂t^{α,i}∂t^{β,j}∂t^{γ,k} − ∂²𝕗/∂t^{α,i−1}∂t^{μ,0} η^{μν} ∂³𝕗/∂t^{ν,0}∂t^{β,j}∂t^{γ,k},
// truncated to the orders where both sides are exact (t-order ≤ T−3).
GradedSeries verify_trr(const GradedSeries& potential, const PotentialSpace& space, const ReconstructionBounds& bounds,
                        Insertion a, Insertion b, Insertion c);

// N(N−1)∂𝕗/∂t^{α,i} − ∂²𝕗/∂t^{α,i−1}∂t^{μ,0} η^{μν} N(N−1)∂𝕗/∂t^{ν,0}, t-order ≤ T−2.
GradedSeries verify_averaged_trr(const GradedSeries& potential, const PotentialSpace& space,
                                 const ReconstructionBounds& bounds, Insertion a);

struct StringDilatonDivisorOptions {
    Rational quadratic_factor = Rational(1, 2);  // ∫ t∧t ↦ factor · η_{αβ} t^{α,0} t^{β,0}
    bool standard_dilaton_sign = true;           // ∂𝕗/∂t^{0,1} = (N−2)𝕗; false uses (2−N)𝕗
    // Off: divisor residual keeps d = 0 terms and the primary sector at d > 0 (t-order ≥ 3).
    bool divisor_descendants_positive_degree = false;
};

struct StringDilatonDivisorResiduals {
    GradedSeries string;
    GradedSeries dilaton;
    std::optional<GradedSeries> divisor;  // nullopt: no divisor class
};

StringDilatonDivisorResiduals verify_string_dilaton_divisor(const GradedSeries& potential, const PotentialSpace& space,
                                                            const ReconstructionBounds& bounds,
                                                            const StringDilatonDivisorOptions& options = {});

// c_{αβ}^ν(z) = ∂³𝕗/∂t^{α,0}∂t^{β,0}∂t^{μ,0}|_{t=0} η^{μν}, as z-series in the potential table.
using StructureConstants = std::vector<std::vector<std::vector<GradedSeries>>>;
StructureConstants quantum_product(const GradedSeries& potential, const PotentialSpace& space);
// (θ_α*θ_β)*θ_γ − θ_α*(θ_β*θ_γ) for all triples, flattened; zero iff associative.
std::vector<GradedSeries> wdvv_residuals(const StructureConstants& c, const PotentialSpace& space);

} // namespace sftrec
