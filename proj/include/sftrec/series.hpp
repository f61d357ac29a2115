#pragma once

#include <sftrec/rational.hpp>
#include <sftrec/variables.hpp>

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sftrec {

// Factors sorted by variable id; exponents nonzero, negative only for ħ and z.
struct Monomial {
    std::vector<std::pair<VarId, int>> factors;

    bool is_one() const { return factors.empty(); }
    int exponent(VarId v) const;
    auto operator<=>(const Monomial&) const = default;
    bool operator==(const Monomial&) const = default;
};

struct TruncationPolicy {
    static constexpr int kUnbounded = 1 << 20;

    int max_t_order = kUnbounded;
    int max_cover = kUnbounded;
    int max_pq_order = kUnbounded;
    int max_hbar_order = kUnbounded;
    int max_z_order = kUnbounded;

    bool admits(const VariableTable& table, const Monomial& m) const;
    friend TruncationPolicy meet(const TruncationPolicy& a, const TruncationPolicy& b);
    bool operator==(const TruncationPolicy&) const = default;
};

int monomial_degree(const VariableTable& table, const Monomial& m);

// Super-commutative product of monomials: nullopt if an odd variable would be squared,
// otherwise the Koszul sign and the canonical product.
std::optional<std::pair<int, Monomial>> multiply_monomials(const VariableTable& table, const Monomial& a,
                                                           const Monomial& b);

class GradedSeries
{
public:
    using Terms = std::map<Monomial, Rational>;

    GradedSeries(TablePtr table, TruncationPolicy trunc = {});

    static GradedSeries constant(TablePtr table, const Rational& c, TruncationPolicy trunc = {});
    static GradedSeries variable(TablePtr table, VarId v, TruncationPolicy trunc = {});
    static GradedSeries monomial(TablePtr table, Monomial m, const Rational& c, TruncationPolicy trunc = {});

    const Terms& terms() const { return terms_; }
    const TablePtr& table() const { return table_; }
    const TruncationPolicy& truncation() const { return trunc_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coefficient(const Monomial& m) const;
    // Adds c·m, dropping it silently if the policy excludes m.
    void add_term(const Monomial& m, const Rational& c);

    // Common degree of all terms, if homogeneous (zero counts as homogeneous of any degree: nullopt).
    std::optional<int> degree() const;
    // Common parity of all terms; nullopt for zero or mixed parity.
    std::optional<int> parity() const;
    // Terms of the given parity only.
    GradedSeries parity_part(int parity) const;

    GradedSeries& operator+=(const GradedSeries& other);
    GradedSeries& operator-=(const GradedSeries& other);
    GradedSeries& operator*=(const Rational& c);
    GradedSeries operator-() const;

    friend GradedSeries operator+(GradedSeries a, const GradedSeries& b) { return a += b; }
    friend GradedSeries operator-(GradedSeries a, const GradedSeries& b) { return a -= b; }
    friend GradedSeries operator*(GradedSeries a, const Rational& c) { return a *= c; }
    friend GradedSeries operator*(const Rational& c, GradedSeries a) { return a *= c; }
    friend GradedSeries operator*(const GradedSeries& a, const GradedSeries& b);

    bool operator==(const GradedSeries& other) const { return terms_ == other.terms_; }

    // Same terms under another policy (no truncation is applied).
    GradedSeries with_truncation(TruncationPolicy trunc) const;

    std::string to_string() const;

private:
    void check_same_table(const GradedSeries& other) const;

    TablePtr table_;
    TruncationPolicy trunc_;
    Terms terms_;
};

GradedSeries multiply(const GradedSeries& f, const GradedSeries& g);
GradedSeries truncate(const GradedSeries& f, const TruncationPolicy& policy);

// Left derivative: v is moved to the front with its Koszul sign, then removed.
GradedSeries graded_derivative(const GradedSeries& f, VarId v);
// Right derivative: v is moved to the back.
GradedSeries right_derivative(const GradedSeries& f, VarId v);

// Sets the listed variables to zero.
GradedSeries set_zero(const GradedSeries& f, std::span<const VarId> vars);
// Multiplies each term by (−1)^{parity·|term|}.
GradedSeries koszul_twist(const GradedSeries& f, int parity);

// Total exponent of variables satisfying pred.
template <class Pred>
int count_exponent(const Monomial& m, Pred pred)
{
    int k = 0;
    for (auto [v, e] : m.factors)
        if (pred(v)) k += e;
    return k;
}

} // namespace sftrec
