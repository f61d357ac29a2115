#pragma once

#include <sftrec/gwrecon.hpp>
#include <sftrec/ops.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sftrec {

struct OrbitSpec {
    std::string id;
    int degree = 0;
    int multiplicity = 1;
    bool good = true;
};

struct OrbitSet {
    std::vector<OrbitSpec> orbits;
    bool equivariant = true;
};

enum class GeneratorKind { Plain, Hat, Check };

struct Generator {
    std::string id;     // "a" (equivariant), "a.hat" / "a.check" otherwise
    std::string orbit;
    GeneratorKind kind = GeneratorKind::Plain;
    int degree = 0;
};

// Good orbits only. Non-equivariant: all hats (orbit order), then all checks.
std::vector<Generator> generators(const OrbitSet& orbits);

struct CountInsertion {
    int cls = 0;
    int level = 0;
    bool constrained = false;
    auto operator<=>(const CountInsertion&) const = default;
};

struct CountEntry {
    std::string from;
    std::string to;
    std::vector<CountInsertion> insertions;
    std::vector<int> degree;
    Rational value;
};

enum class SectionChoice { TwoZero, OneOne, ZeroTwo, Generic };

std::string_view to_string(SectionChoice s);
std::optional<SectionChoice> section_choice_from_string(std::string_view s);

struct CountData {
    std::vector<CountEntry> entries;
    SectionChoice label = SectionChoice::Generic;
};

struct ChainComplexData {
    std::string name;
    OrbitSet orbits;
    CountData counts;
    TargetModel model;
    // Set when model is S¹ × fiber: the potential is Σ t^{β₁,j} ∂𝕗_fiber/∂t^{β,j}, fiber classes first.
    std::optional<TargetModel> fiber;
    ReconstructionBounds bounds;  // potential and exactness orders; max_level bounds count levels
    bool contact = false;

    void validate() const;
};

struct InvalidLabel : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NonSplitData : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Matrix of series; column j is the image of source generator j. Parity-homogeneous.
class LinearChainMap
{
public:
    LinearChainMap(TablePtr table, std::vector<int> source_degrees, std::vector<int> target_degrees, int degree);

    std::size_t rows() const { return target_.size(); }
    std::size_t cols() const { return source_.size(); }
    int degree() const { return degree_; }
    const TablePtr& table() const { return table_; }
    const std::vector<int>& source_degrees() const { return source_; }
    const std::vector<int>& target_degrees() const { return target_; }

    const GradedSeries& at(std::size_t row, std::size_t col) const { return entries_[row * cols() + col]; }
    void add(std::size_t row, std::size_t col, const GradedSeries& s);
    void set(std::size_t row, std::size_t col, GradedSeries s);

    bool is_zero() const;
    std::vector<std::pair<std::size_t, std::size_t>> nonzero_entries() const;

    // Applies op to every entry; op must shift parity by op_degree.
    template <class F>
    LinearChainMap map_entries(F op, int op_degree) const
    {
        LinearChainMap out(table_, source_, target_, degree_ + op_degree);
        for (std::size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = op(entries_[k]);
        return out;
    }

    LinearChainMap block(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                         int degree_shift = 0) const;

    LinearChainMap& operator+=(const LinearChainMap& o);
    LinearChainMap& operator-=(const LinearChainMap& o);
    LinearChainMap& operator*=(const Rational& c);
    friend LinearChainMap operator+(LinearChainMap a, const LinearChainMap& b) { return a += b; }
    friend LinearChainMap operator-(LinearChainMap a, const LinearChainMap& b) { return a -= b; }
    friend LinearChainMap operator*(const Rational& c, LinearChainMap a) { return a *= c; }
    bool operator==(const LinearChainMap& o) const;

private:
    void check_shape(const LinearChainMap& o) const;

    TablePtr table_;
    std::vector<int> source_;
    std::vector<int> target_;
    int degree_;
    std::vector<GradedSeries> entries_;
};

LinearChainMap compose(const LinearChainMap& a, const LinearChainMap& b);
inline std::optional<int> map_degree(const LinearChainMap& a) { return a.degree(); }
// c·A; the degree grows by the degree (or parity) of c.
LinearChainMap scale(const GradedSeries& c, const LinearChainMap& a);
LinearChainMap set_zero(const LinearChainMap& a, std::span<const VarId> vars);
LinearChainMap truncate(const LinearChainMap& a, const TruncationPolicy& policy);
// Moves entries to another table, matching variables by id.
LinearChainMap rebase(const LinearChainMap& a, const TablePtr& target);

class ChainComplex
{
public:
    explicit ChainComplex(ChainComplexData data);

    const ChainComplexData& data() const { return data_; }
    const PotentialSpace& space() const { return space_; }
    const std::vector<Generator>& generators() const { return gens_; }
    const LinearChainMap& differential() const { return d_; }
    const GradedSeries& potential() const { return potential_; }

    std::size_t index(const std::string& generator) const;
    // ∂_{(α,i)} = ∂/∂t^{α,i} ∘ ∂
    LinearChainMap decorated(int cls, int level) const;
    // ∂_{(α̌,i)} = ∂/∂ť^{α,i} ∘ ∂
    LinearChainMap decorated_check(int cls, int level) const;
    // Sets every t and ť to zero.
    LinearChainMap at_zero(const LinearChainMap& m) const;
    std::vector<VarId> t_like_variables() const;
    // t of the S¹-wedged classes (empty without a fiber).
    std::vector<VarId> wedge_variables() const;
    // Exact t-order window of the residual identities.
    TruncationPolicy residual_truncation() const;

private:
    ChainComplexData data_;
    std::vector<Generator> gens_;
    PotentialSpace space_;
    GradedSeries potential_;
    LinearChainMap d_;
};

ChainComplex build_differential(const ChainComplexData& data);

struct DSquaredReport {
    LinearChainMap residual;
    std::vector<std::pair<std::string, std::string>> offending;  // (from, to)
    bool zero() const { return offending.empty(); }
};

DSquaredReport verify_d_squared(const ChainComplex& complex);

// Quotient of z-polynomials.
class RationalFunction
{
public:
    RationalFunction(TablePtr table);
    RationalFunction(GradedSeries num);
    RationalFunction(GradedSeries num, GradedSeries den);

    const GradedSeries& num() const { return num_; }
    const GradedSeries& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    RationalFunction& operator+=(const RationalFunction& o);
    RationalFunction& operator-=(const RationalFunction& o);
    RationalFunction& operator*=(const RationalFunction& o);
    RationalFunction& operator/=(const RationalFunction& o);
    friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
    friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
    friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
    friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }
    bool operator==(const RationalFunction& o) const;

    std::string to_string() const;

private:
    void tidy();

    GradedSeries num_;
    GradedSeries den_;
};

using RFVector = std::vector<RationalFunction>;
using RFMatrix = std::vector<RFVector>;  // row-major

// t = ť = 0 entries; throws if a t-like variable survives.
RFMatrix to_rf_matrix(const LinearChainMap& m);
RFVector apply_matrix(const RFMatrix& m, const RFVector& v);
std::size_t rank(RFMatrix m);
// Basis of the null space of m restricted to the given columns, as full-length vectors.
std::vector<RFVector> kernel_basis(const RFMatrix& m, const std::vector<std::size_t>& cols, std::size_t width);

class Homology
{
public:
    // Throws InvalidInput if ∂² ≠ 0 or ∂ is not homogeneous.
    explicit Homology(const ChainComplex& complex);

    // Degrees are exact when modulus() == 0, otherwise residues mod modulus().
    const std::map<int, int>& betti() const { return betti_; }
    int total() const;
    int modulus() const { return modulus_; }
    const std::vector<RFVector>& representatives() const { return reps_; }
    const std::vector<RFVector>& cycles() const { return cycles_; }
    const std::vector<RFVector>& boundaries() const { return boundaries_; }
    const RFMatrix& differential() const { return d0_; }

    bool is_cycle(const RFVector& v) const;
    bool is_boundary(const RFVector& v) const;

private:
    RFMatrix d0_;
    int modulus_ = 0;
    std::map<int, int> betti_;
    std::vector<RFVector> reps_;
    std::vector<RFVector> cycles_;
    std::vector<RFVector> boundaries_;
    std::size_t image_rank_ = 0;
};

enum class PairOrdering {
    PairCount,  // (N−1)∘Ň: weight |Y|(|Y|−1) on a term with |Y| t/ť variables
    Literal,    // Ň∘(N−1): weight |Y|(|Y|−2)
};

struct TrrOptions {
    PairOrdering pair = PairOrdering::PairCount;
    // Adds Σ η^{μν}(∂/∂t^{μ} ∂_{(α̌,i−1)})·N(N−1)∂𝕗/∂t^{ν} to the (0,2) right side.
    bool sphere_bubble = true;
};

LinearChainMap apply_pair_operator(const LinearChainMap& m, PairOrdering pair);

// LHS − RHS of one identity for class a.cls at level a.level ≥ 1, exact window only.
// Throws InvalidLabel unless the data carries the identity's label.
LinearChainMap noneq_trr_residual(const ChainComplex& complex, SectionChoice identity, Insertion a,
                                  const TrrOptions& options = {});

struct TrrCheck {
    SectionChoice identity = SectionChoice::TwoZero;
    Insertion insertion;
    bool chain_level = true;  // false: t = 0 residual tested for ∂-exactness on cycles
    bool passed = false;
    std::size_t nonzero = 0;
    std::string detail;
};

// Chain level for the data's own label; generic data only gets (2,0) on homology.
std::vector<TrrCheck> verify_noneq_trr(const ChainComplex& complex, const TrrOptions& options = {});

struct EquivariantMaps {
    LinearChainMap d;        // Ĉ→Ĉ of ∂
    LinearChainMap split;    // Ĉ→Č of ∂
};

// Throws NonSplitData unless the hat and check diagonal blocks agree and Č→Ĉ vanishes.
EquivariantMaps split_blocks(const ChainComplex& complex);

LinearChainMap equiv_trr_residual(const ChainComplex& complex, SectionChoice identity, Insertion a,
                                  const TrrOptions& options = {});

struct ContactEntry {
    Insertion insertion;
    bool induced_zero = false;
    bool coefficient_zero = false;
};

struct ContactReport {
    bool skipped = false;
    std::string reason;
    std::vector<ContactEntry> entries;
    bool passed() const;
};

ContactReport verify_contact_vanishing(const ChainComplex& complex);

struct ActionCheck {
    int alpha = 0;
    std::optional<int> beta;  // none: unit axiom
    std::size_t representative = 0;
    bool exact = false;
};

struct QuantumActionReport {
    std::vector<ActionCheck> checks;
    bool passed() const;
};

struct ActionDoesNotDescend : Error {
    using Error::Error;
};

// Action of t^α by ∂¹_{α̌} at t = 0, checked against the quantum product on homology.
QuantumActionReport quantum_action(const ChainComplex& complex, const Homology& homology);

// S¹ × M: fiber classes, then α₁ = α∧dt of degree deg α + 1.
TargetModel circle_product(const TargetModel& fiber);

struct FloerModel {
    ChainComplexData floer;     // hat/check copies of CF over M, ∂ = diag(∂, ∂)
    ChainComplexData cylinder;  // the same orbits over S¹ × M
};

// Orbit families "k<period>_<class>", decorated counts from the fiber correlators.
FloerModel build_floer_model(const TargetModel& fiber, int periods, const ReconstructionBounds& bounds,
                             SectionChoice label);

// Equivariant, point potential: ∂a = b, ∂_{(1,1)} e = b; one bad orbit.
ChainComplexData contact_fixture();
// Non-equivariant, generic label: ∂f̂ = â, ∂_{(1̌,1)} ê = â on both copies.
ChainComplexData generic_fixture();

} // namespace sftrec
