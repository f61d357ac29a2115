#pragma once

#include <sftrec/rational.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sftrec {

// Marked points 1..r with the psi point i, punctures Γ⁺ (n_plus) and Γ⁻ (n_minus).
struct SplitSpace {
    int r = 0;
    int i = 1;
    int n_plus = 0;
    int n_minus = 0;

    int P() const { return n_plus + n_minus; }
    auto operator<=>(const SplitSpace&) const = default;
};

// Two-sided symbol; the second side (J, Γ⁺₂, Γ⁻₂) never contains i. Bit k−1 is point/puncture k.
struct Splitting {
    std::uint32_t J = 0;
    std::uint32_t plus2 = 0;
    std::uint32_t minus2 = 0;

    int r2() const;
    int P2() const;
    auto operator<=>(const Splitting&) const = default;
};

std::string to_string(const SplitSpace& space, const Splitting& s);

struct DivisorExpression {
    SplitSpace space;
    std::map<Splitting, Rational> terms;

    Rational coefficient(const Splitting& s) const;
    void add(const Splitting& s, const Rational& c);
    bool operator==(const DivisorExpression&) const = default;
};

// Σ over (I|J), i ∈ I, |J| = k ∈ [2, n−2], of (n−3)!/(n−1)! · k!/(k−2)! D_{(I|J)}.
DivisorExpression averaged_psi(int n, int i);

enum class MapVariant { A, B, C };

struct ZeroLocus {
    Rational lhs;
    DivisorExpression expr;
};

// The three averaged multisection formulas; only nonzero coefficients are emitted.
ZeroLocus averaged_map_zero_locus(const SplitSpace& space, MapVariant variant);

// Target: L · s⁻¹(0) = Σ rule(r₂, P₂) D.
struct TargetRule {
    std::string name;
    Rational lhs;
    std::function<Rational(int r1, int r2, int P2)> coefficient;
};

// (P(P−1)/2, P₂(P₂−1)/2), ((r−1)P, r₂P₂), ((r−1)(r−2)/2, r₂(r₂−1)/2)
std::vector<TargetRule> simplified_targets(const SplitSpace& space);

struct CombinationResult {
    bool feasible = false;
    std::vector<Rational> weights;  // Σ λ_k expr_k = ρ · target with ρ = 1
    Rational scale = 1;
    // on infeasibility: a minimal inconsistent subset of equations, by label
    std::vector<std::string> certificate;
};

CombinationResult solve_combination(const std::vector<ZeroLocus>& exprs, const TargetRule& target);

// Σ w_k expr_k equals the target on every splitting, LHS included.
bool combination_matches(const std::vector<ZeroLocus>& exprs, const std::vector<Rational>& weights, const TargetRule& target);

// Pairs {a,b} ⊂ {1..5} naming the ten boundary divisors of M̄₀,₅.
using DivisorPair = std::pair<int, int>;
DivisorPair make_pair_divisor(int a, int b);
DivisorPair m05_divisor(const SplitSpace& space, const Splitting& s);
int m05_pairing(DivisorPair a, DivisorPair b);
Rational intersection_pairing_M05(const DivisorExpression& a, const DivisorExpression& b);

struct LedgerPoint {
    DivisorPair location;  // the point target ∩ location
    Rational index;
};

// Intersections of a perturbed weighted divisor with a target divisor.
struct LedgerEntry {
    DivisorPair perturbed;
    Rational weight;
    DivisorPair target;
    std::vector<LedgerPoint> points;
};

struct RestrictionContribution {
    DivisorPair location;
    DivisorPair source;
    Rational index;
};

// Zero-locus indices found on a divisor, to be compared with the averaged psi class one dimension lower.
struct RestrictionEntry {
    DivisorPair divisor;
    std::vector<RestrictionContribution> contributions;
};

struct PerturbationLedger {
    int psi_point = 1;
    std::vector<LedgerEntry> entries;
    std::vector<RestrictionEntry> restrictions;
};

// Images under every permutation of {1..5} fixing the psi point, deduplicated.
PerturbationLedger symmetrize(const PerturbationLedger& ledger);

struct LedgerReport {
    int sums_checked = 0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

// Each entry: Σ indices = weight · (perturbed · target), every location a genuine intersection point.
// Each restriction: per-location totals equal averaged_psi(4, ·) on the divisor; divisors through the
// psi point carry nothing.
LedgerReport perturbation_ledger_check(const PerturbationLedger& ledger);

} // namespace sftrec
