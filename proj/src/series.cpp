#include <sftrec/series.hpp>

#include <algorithm>
#include <sstream>

namespace sftrec {

int Monomial::exponent(VarId v) const
{
    auto it = std::lower_bound(factors.begin(), factors.end(), std::pair<VarId, int>{v, 0},
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    return (it != factors.end() && it->first == v) ? it->second : 0;
}

bool TruncationPolicy::admits(const VariableTable& table, const Monomial& m) const
{
    int t = 0, pq = 0, z = 0, hbar = 0;
    for (auto [v, e] : m.factors) {
        switch (table.kind(v)) {
        case VarKind::T:
        case VarKind::TCheck: t += e; break;
        case VarKind::QOrbit:
        case VarKind::POrbit:
            if (table.cover(v) > max_cover) return false;
            pq += e;
            break;
        case VarKind::Z: z += e; break;
        case VarKind::Hbar: hbar += e; break;
        }
    }
    return t <= max_t_order && pq <= max_pq_order && z <= max_z_order && hbar <= max_hbar_order;
}

TruncationPolicy meet(const TruncationPolicy& a, const TruncationPolicy& b)
{
    return {std::min(a.max_t_order, b.max_t_order), std::min(a.max_cover, b.max_cover),
            std::min(a.max_pq_order, b.max_pq_order), std::min(a.max_hbar_order, b.max_hbar_order),
            std::min(a.max_z_order, b.max_z_order)};
}

int monomial_degree(const VariableTable& table, const Monomial& m)
{
    int d = 0;
    for (auto [v, e] : m.factors) d += table.degree(v) * e;
    return d;
}

std::optional<std::pair<int, Monomial>> multiply_monomials(const VariableTable& table, const Monomial& a,
                                                           const Monomial& b)
{
    Monomial out;
    out.factors.reserve(a.factors.size() + b.factors.size());
    int odd_left_in_a = 0;
    for (auto [v, e] : a.factors)
        if (table.odd(v)) ++odd_left_in_a;
    int sign = 1;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
        if (j == b.factors.size() || (i < a.factors.size() && a.factors[i].first < b.factors[j].first)) {
            if (table.odd(a.factors[i].first)) --odd_left_in_a;
            out.factors.push_back(a.factors[i++]);
        } else if (i == a.factors.size() || b.factors[j].first < a.factors[i].first) {
            if (table.odd(b.factors[j].first) && (odd_left_in_a & 1)) sign = -sign;
            out.factors.push_back(b.factors[j++]);
        } else {
            VarId v = a.factors[i].first;
            if (table.odd(v)) return std::nullopt;
            int e = a.factors[i].second + b.factors[j].second;
            if (e != 0) out.factors.emplace_back(v, e);
            ++i;
            ++j;
        }
    }
    return std::pair{sign, std::move(out)};
}

GradedSeries::GradedSeries(TablePtr table, TruncationPolicy trunc) : table_(std::move(table)), trunc_(trunc)
{
    if (!table_) throw Error("series requires a variable table");
}

GradedSeries GradedSeries::constant(TablePtr table, const Rational& c, TruncationPolicy trunc)
{
    GradedSeries s(std::move(table), trunc);
    s.add_term(Monomial{}, c);
    return s;
}

GradedSeries GradedSeries::variable(TablePtr table, VarId v, TruncationPolicy trunc)
{
    if (v >= table->size()) throw UnknownVariable("#" + std::to_string(v));
    return monomial(std::move(table), Monomial{{{v, 1}}}, Rational(1), trunc);
}

GradedSeries GradedSeries::monomial(TablePtr table, Monomial m, const Rational& c, TruncationPolicy trunc)
{
    GradedSeries s(std::move(table), trunc);
    for (std::size_t k = 0; k < m.factors.size(); ++k) {
        auto [v, e] = m.factors[k];
        if (v >= s.table_->size()) throw UnknownVariable("#" + std::to_string(v));
        if (k > 0 && m.factors[k - 1].first >= v) throw Error("monomial factors not in canonical order");
        if (e == 0) throw Error("monomial with zero exponent");
        auto kind = s.table_->kind(v);
        if (e < 0 && kind != VarKind::Hbar && kind != VarKind::Z)
            throw Error("negative exponent on '" + (*s.table_)[v].id + "'");
        if (s.table_->odd(v) && e != 1) {
            if (e > 1) return s;
            throw Error("odd variable with negative exponent");
        }
    }
    s.add_term(m, c);
    return s;
}

Rational GradedSeries::coefficient(const Monomial& m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

void GradedSeries::add_term(const Monomial& m, const Rational& c)
{
    if (c == 0 || !trunc_.admits(*table_, m)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

std::optional<int> GradedSeries::degree() const
{
    std::optional<int> d;
    for (const auto& [m, c] : terms_) {
        int dm = monomial_degree(*table_, m);
        if (d && *d != dm) return std::nullopt;
        d = dm;
    }
    return d;
}

std::optional<int> GradedSeries::parity() const
{
    std::optional<int> p;
    for (const auto& [m, c] : terms_) {
        int pm = monomial_degree(*table_, m) & 1;
        if (p && *p != pm) return std::nullopt;
        p = pm;
    }
    return p;
}

GradedSeries GradedSeries::parity_part(int parity) const
{
    GradedSeries out(table_, trunc_);
    for (const auto& [m, c] : terms_)
        if ((monomial_degree(*table_, m) & 1) == (parity & 1)) out.terms_.emplace_hint(out.terms_.end(), m, c);
    return out;
}

void GradedSeries::check_same_table(const GradedSeries& other) const
{
    if (table_ != other.table_) throw TableMismatch();
}

GradedSeries& GradedSeries::operator+=(const GradedSeries& other)
{
    check_same_table(other);
    auto merged = meet(trunc_, other.trunc_);
    if (!(merged == trunc_)) {
        trunc_ = merged;
        for (auto it = terms_.begin(); it != terms_.end();)
            it = trunc_.admits(*table_, it->first) ? std::next(it) : terms_.erase(it);
    }
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
}

GradedSeries& GradedSeries::operator-=(const GradedSeries& other)
{
    return *this += -other;
}

GradedSeries& GradedSeries::operator*=(const Rational& c)
{
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

GradedSeries GradedSeries::operator-() const
{
    GradedSeries out(*this);
    for (auto& [m, v] : out.terms_) v = -v;
    return out;
}

GradedSeries operator*(const GradedSeries& a, const GradedSeries& b)
{
    return multiply(a, b);
}

GradedSeries GradedSeries::with_truncation(TruncationPolicy trunc) const
{
    GradedSeries out(*this);
    out.trunc_ = trunc;
    return out;
}

std::string GradedSeries::to_string() const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        Rational a = abs(c);
        os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
        bool unit = (a == 1) && !m.is_one();
        if (!unit) os << sftrec::to_string(a);
        bool star = !unit;
        for (auto [v, e] : m.factors) {
            os << (star ? "*" : "") << (*table_)[v].id;
            if (e != 1) os << "^" << e;
            star = true;
        }
        first = false;
    }
    return os.str();
}

GradedSeries multiply(const GradedSeries& f, const GradedSeries& g)
{
    if (f.table() != g.table()) throw TableMismatch();
    const auto& table = *f.table();
    GradedSeries out(f.table(), meet(f.truncation(), g.truncation()));
    for (const auto& [mf, cf] : f.terms())
        for (const auto& [mg, cg] : g.terms()) {
            auto prod = multiply_monomials(table, mf, mg);
            if (!prod) continue;
            Rational c = cf * cg;
            if (prod->first < 0) c = -c;
            out.add_term(prod->second, c);
        }
    return out;
}

GradedSeries truncate(const GradedSeries& f, const TruncationPolicy& policy)
{
    GradedSeries out(f.table(), meet(f.truncation(), policy));
    for (const auto& [m, c] : f.terms()) out.add_term(m, c);
    return out;
}

namespace {

template <bool Left>
GradedSeries derivative(const GradedSeries& f, VarId v)
{
    const auto& table = *f.table();
    if (v >= table.size()) throw UnknownVariable("#" + std::to_string(v));
    GradedSeries out(f.table(), f.truncation());
    bool v_odd = table.odd(v);
    for (const auto& [m, c] : f.terms()) {
        int e = m.exponent(v);
        if (e == 0) continue;
        Monomial r;
        r.factors.reserve(m.factors.size());
        int passed_odd = 0;
        bool after = false;
        for (auto [u, eu] : m.factors) {
            if (u == v) {
                after = true;
                if (eu != 1) r.factors.emplace_back(u, eu - 1);
                continue;
            }
            if (table.odd(u) && (Left ? !after : after)) ++passed_odd;
            r.factors.emplace_back(u, eu);
        }
        Rational coef = c * e;
        if (v_odd && (passed_odd & 1)) coef = -coef;
        out.add_term(r, coef);
    }
    return out;
}

} // namespace

GradedSeries graded_derivative(const GradedSeries& f, VarId v)
{
    return derivative<true>(f, v);
}

GradedSeries right_derivative(const GradedSeries& f, VarId v)
{
    return derivative<false>(f, v);
}

GradedSeries set_zero(const GradedSeries& f, std::span<const VarId> vars)
{
    GradedSeries out(f.table(), f.truncation());
    for (const auto& [m, c] : f.terms()) {
        bool hit = std::any_of(vars.begin(), vars.end(), [&](VarId v) { return m.exponent(v) != 0; });
        if (!hit) out.add_term(m, c);
    }
    return out;
}

GradedSeries koszul_twist(const GradedSeries& f, int parity)
{
    if ((parity & 1) == 0) return f;
    GradedSeries out(f.table(), f.truncation());
    for (const auto& [m, c] : f.terms())
        out.add_term(m, (monomial_degree(*f.table(), m) & 1) ? Rational(-c) : c);
    return out;
}

} // namespace sftrec
