#include <sftrec/ops.hpp>

#include <algorithm>
#include <map>

namespace sftrec {

namespace {

// Sorts a derivative list ascending; ∂_u∂_v = (−1)^{|u||v|}∂_v∂_u. Returns 0 if an odd ∂ repeats.
int canonical_derivatives(const VariableTable& t, std::vector<VarId>& d)
{
    int sign = 1;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j + 1 < d.size() - i; ++j)
            if (d[j] > d[j + 1]) {
                if (t.odd(d[j]) && t.odd(d[j + 1])) sign = -sign;
                std::swap(d[j], d[j + 1]);
            }
    for (std::size_t j = 0; j + 1 < d.size(); ++j)
        if (d[j] == d[j + 1] && t.odd(d[j])) return 0;
    return sign;
}

struct Partial {
    Rational c;
    Monomial x;
    std::vector<VarId> d;
};

} // namespace

DifferentialOperator DifferentialOperator::identity(TablePtr table)
{
    return scalar(std::move(table), 1);
}

DifferentialOperator DifferentialOperator::scalar(TablePtr table, const Rational& c)
{
    DifferentialOperator op(std::move(table));
    op.add_term(c, Monomial{}, {});
    return op;
}

void DifferentialOperator::add_term(const Rational& coef, const Monomial& multiplier, std::vector<VarId> derivatives)
{
    for (VarId v : derivatives)
        if (v >= table_->size()) throw UnknownVariable("#" + std::to_string(v));
    terms_.push_back({coef, multiplier, std::move(derivatives)});
    normalize();
}

void DifferentialOperator::normalize()
{
    std::map<std::pair<Monomial, std::vector<VarId>>, Rational> merged;
    for (auto& term : terms_) {
        int s = canonical_derivatives(*table_, term.derivatives);
        if (s == 0 || term.coef == 0) continue;
        merged[{term.multiplier, term.derivatives}] += s * term.coef;
    }
    terms_.clear();
    for (auto& [key, c] : merged)
        if (c != 0) terms_.push_back({c, key.first, key.second});
}

GradedSeries DifferentialOperator::apply(const GradedSeries& f) const
{
    if (f.table() != table_) throw TableMismatch();
    GradedSeries out(table_, f.truncation());
    for (const auto& term : terms_) {
        GradedSeries g = f;
        for (auto it = term.derivatives.rbegin(); it != term.derivatives.rend() && !g.is_zero(); ++it)
            g = graded_derivative(g, *it);
        if (g.is_zero()) continue;
        out += GradedSeries::monomial(table_, term.multiplier, term.coef, f.truncation()) * g;
    }
    return out;
}

std::optional<int> DifferentialOperator::degree() const
{
    if (declared_) return declared_;
    std::optional<int> d;
    for (const auto& term : terms_) {
        int dt = monomial_degree(*table_, term.multiplier);
        for (VarId v : term.derivatives) dt -= table_->degree(v);
        if (d && *d != dt) return std::nullopt;
        d = dt;
    }
    return d;
}

DifferentialOperator& DifferentialOperator::operator+=(const DifferentialOperator& other)
{
    if (table_ != other.table_) throw TableMismatch();
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    if (declared_ != other.declared_) declared_.reset();
    normalize();
    return *this;
}

DifferentialOperator& DifferentialOperator::operator*=(const Rational& c)
{
    for (auto& term : terms_) term.coef *= c;
    normalize();
    return *this;
}

DifferentialOperator operator-(DifferentialOperator a, const DifferentialOperator& b)
{
    return a += Rational(-1) * b;
}

bool DifferentialOperator::operator==(const DifferentialOperator& other) const
{
    if (terms_.size() != other.terms_.size()) return false;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto &a = terms_[k], &b = other.terms_[k];
        if (a.coef != b.coef || a.multiplier != b.multiplier || a.derivatives != b.derivatives) return false;
    }
    return true;
}

DifferentialOperator compose(const DifferentialOperator& a, const DifferentialOperator& b)
{
    if (a.table() != b.table()) throw TableMismatch();
    const auto& table = a.table();
    DifferentialOperator out(table);
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms()) {
            std::vector<Partial> parts{{Rational(1), tb.multiplier, {}}};
            for (auto it = ta.derivatives.rbegin(); it != ta.derivatives.rend(); ++it) {
                VarId v = *it;
                std::vector<Partial> next;
                for (auto& p : parts) {
                    auto dx = graded_derivative(GradedSeries::monomial(table, p.x, p.c), v);
                    for (const auto& [m, c] : dx.terms()) next.push_back({c, m, p.d});
                    Rational c = p.c;
                    if (table->odd(v) && (monomial_degree(*table, p.x) & 1)) c = -c;
                    std::vector<VarId> d{v};
                    d.insert(d.end(), p.d.begin(), p.d.end());
                    next.push_back({c, p.x, std::move(d)});
                }
                parts = std::move(next);
            }
            for (auto& p : parts) {
                auto prod = multiply_monomials(*table, ta.multiplier, p.x);
                if (!prod) continue;
                std::vector<VarId> d = p.d;
                d.insert(d.end(), tb.derivatives.begin(), tb.derivatives.end());
                out.add_term(ta.coef * tb.coef * p.c * prod->first, prod->second, std::move(d));
            }
        }
    auto da = a.degree(), db = b.degree();
    if (da && db) out.declare_degree(*da + *db);
    return out;
}

DifferentialOperator number_operator(const TablePtr& table)
{
    DifferentialOperator op(table);
    for (VarId v = 0; v < table->size(); ++v)
        if (table->kind(v) == VarKind::T) op.add_term(1, Monomial{{{v, 1}}}, {v});
    if (op.terms().empty()) op.declare_degree(0);
    return op;
}

DifferentialOperator check_number_operator(const TablePtr& table)
{
    DifferentialOperator op(table);
    for (VarId v = 0; v < table->size(); ++v) {
        if (table->kind(v) != VarKind::TCheck) continue;
        auto t = table->find(VarKind::T, (*table)[v].indices);
        if (!t) throw InvalidInput("constrained variable '" + (*table)[v].id + "' has no matching t-variable");
        op.add_term(1, Monomial{{{*t, 1}}}, {v});
    }
    if (op.terms().empty()) op.declare_degree(0);
    return op;
}

DifferentialOperator euler_operator(const TablePtr& table)
{
    DifferentialOperator op(table);
    for (VarId v = 0; v < table->size(); ++v) {
        switch (table->kind(v)) {
        case VarKind::Hbar: op.add_term(-2, Monomial{{{v, 1}}}, {v}); break;
        case VarKind::QOrbit:
        case VarKind::POrbit:
        case VarKind::T: op.add_term(-1, Monomial{{{v, 1}}}, {v}); break;
        default: break;
        }
    }
    if (op.terms().empty()) op.declare_degree(0);
    return op;
}

GradedSeries apply_N(const GradedSeries& f)
{
    return number_operator(f.table()).apply(f);
}

GradedSeries apply_N_check(const GradedSeries& f)
{
    return check_number_operator(f.table()).apply(f);
}

GradedSeries apply_euler(const GradedSeries& f)
{
    return euler_operator(f.table()).apply(f);
}

GradedSeries apply_N_N_minus_1(const GradedSeries& f)
{
    const auto& table = *f.table();
    GradedSeries out(f.table(), f.truncation());
    for (const auto& [m, c] : f.terms()) {
        int k = count_exponent(m, [&](VarId v) { return table.kind(v) == VarKind::T; });
        if (k > 1) out.add_term(m, c * k * (k - 1));
    }
    return out;
}

} // namespace sftrec
