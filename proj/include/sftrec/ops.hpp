#pragma once

#include <sftrec/series.hpp>

#include <concepts>
#include <optional>
#include <vector>

namespace sftrec {

struct OperatorTerm {
    Rational coef;
    Monomial multiplier;
    std::vector<VarId> derivatives;  // applied right to left
};

// Finite sum of coef · multiplier · ∂_{d1}∘…∘∂_{dk} with left derivatives.
class DifferentialOperator
{
public:
    explicit DifferentialOperator(TablePtr table) : table_(std::move(table)) {}

    static DifferentialOperator identity(TablePtr table);
    static DifferentialOperator scalar(TablePtr table, const Rational& c);

    void add_term(const Rational& coef, const Monomial& multiplier, std::vector<VarId> derivatives);

    GradedSeries apply(const GradedSeries& f) const;

    const std::vector<OperatorTerm>& terms() const { return terms_; }
    const TablePtr& table() const { return table_; }

    // Declared degree if set, otherwise the common degree of all terms.
    std::optional<int> degree() const;
    void declare_degree(int d) { declared_ = d; }

    DifferentialOperator& operator+=(const DifferentialOperator& other);
    DifferentialOperator& operator*=(const Rational& c);
    friend DifferentialOperator operator+(DifferentialOperator a, const DifferentialOperator& b) { return a += b; }
    friend DifferentialOperator operator-(DifferentialOperator a, const DifferentialOperator& b);
    friend DifferentialOperator operator*(const Rational& c, DifferentialOperator a) { return a *= c; }

    bool operator==(const DifferentialOperator& other) const;

private:
    void normalize();

    TablePtr table_;
    std::vector<OperatorTerm> terms_;
    std::optional<int> declared_;
};

DifferentialOperator compose(const DifferentialOperator& a, const DifferentialOperator& b);
inline std::optional<int> map_degree(const DifferentialOperator& a) { return a.degree(); }

// N = Σ t^{β,j} ∂/∂t^{β,j}.
DifferentialOperator number_operator(const TablePtr& table);
// Ň = Σ t^{β,j} ∂/∂ť^{β,j}; every ť needs its t partner in the table.
DifferentialOperator check_number_operator(const TablePtr& table);
// D_Euler = −2ħ∂/∂ħ − Σ p∂/∂p − Σ q∂/∂q − Σ t∂/∂t.
DifferentialOperator euler_operator(const TablePtr& table);

GradedSeries apply_N(const GradedSeries& f);
GradedSeries apply_N_check(const GradedSeries& f);
GradedSeries apply_euler(const GradedSeries& f);
// N(N−1) f, computed from eigenvalues.
GradedSeries apply_N_N_minus_1(const GradedSeries& f);

template <class M>
concept GradedLinearMap = requires(const M& a, const M& b, const Rational& c) {
    { map_degree(a) } -> std::convertible_to<std::optional<int>>;
    { compose(a, b) } -> std::convertible_to<M>;
    { a + b } -> std::convertible_to<M>;
    { a - b } -> std::convertible_to<M>;
};

template <GradedLinearMap M>
int required_degree(const M& a)
{
    auto d = map_degree(a);
    if (!d) throw DegreeUndeclared();
    return *d;
}

// [A,B]_- = A∘B − (−1)^{deg A·deg B} B∘A
template <GradedLinearMap M>
M graded_commutator(const M& a, const M& b)
{
    bool odd = (required_degree(a) * required_degree(b)) & 1;
    return odd ? compose(a, b) + compose(b, a) : compose(a, b) - compose(b, a);
}

// [A,B]_+ = A∘B + (−1)^{deg A·deg B} B∘A
template <GradedLinearMap M>
M graded_anticommutator(const M& a, const M& b)
{
    bool odd = (required_degree(a) * required_degree(b)) & 1;
    return odd ? compose(a, b) - compose(b, a) : compose(a, b) + compose(b, a);
}

} // namespace sftrec
