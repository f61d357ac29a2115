#include <sftrec/brackets.hpp>

namespace sftrec {

namespace {

GradedSeries bracket_homogeneous(const GradedSeries& f, int pf, const GradedSeries& g, int pg)
{
    const auto& table = *f.table();
    GradedSeries out(f.table(), meet(f.truncation(), g.truncation()));
    for (VarId p : table.p_variables()) {
        VarId q = table.partner(p);
        Rational kappa(table[p].multiplicity);
        auto fp = right_derivative(f, p);
        auto gq = graded_derivative(g, q);
        if (!fp.is_zero() && !gq.is_zero()) out += kappa * (fp * gq);
        auto gp = right_derivative(g, p);
        auto fq = graded_derivative(f, q);
        if (!gp.is_zero() && !fq.is_zero()) {
            Rational k = (pf & pg & 1) ? kappa : Rational(-kappa);
            out += k * (gp * fq);
        }
    }
    return out;
}

template <class Op>
GradedSeries by_parity(const GradedSeries& f, const GradedSeries& g, Op op)
{
    if (f.table() != g.table()) throw TableMismatch();
    GradedSeries out(f.table(), meet(f.truncation(), g.truncation()));
    for (int pf = 0; pf < 2; ++pf) {
        auto fp = f.parity_part(pf);
        if (fp.is_zero()) continue;
        for (int pg = 0; pg < 2; ++pg) {
            auto gp = g.parity_part(pg);
            if (!gp.is_zero()) out += op(fp, pf, gp, pg);
        }
    }
    return out;
}

// p ⋆ G = p·G + κħ ∂G/∂q.
GradedSeries left_p(const GradedSeries& G, VarId p, const GradedSeries& hbar)
{
    const auto& table = *G.table();
    auto out = GradedSeries::variable(G.table(), p, G.truncation()) * G;
    auto dq = graded_derivative(G, table.partner(p));
    if (!dq.is_zero()) out += Rational(table[p].multiplicity) * (hbar * dq);
    return out;
}

} // namespace

GradedSeries poisson_bracket(const GradedSeries& f, const GradedSeries& g)
{
    return by_parity(f, g, bracket_homogeneous);
}

GradedSeries star_product(const GradedSeries& f, const GradedSeries& g)
{
    if (f.table() != g.table()) throw TableMismatch();
    const auto& table = *f.table();
    auto trunc = meet(f.truncation(), g.truncation());
    GradedSeries out(f.table(), trunc);
    if (f.is_zero() || g.is_zero()) return out;
    auto hvar = table.hbar();
    if (!hvar) throw Error("star product requires an hbar variable");
    auto hbar = GradedSeries::variable(f.table(), *hvar, trunc);
    auto g_t = g.with_truncation(trunc);

    for (const auto& [m, c] : f.terms()) {
        Monomial rest, ps;
        std::vector<VarId> p_factors;
        for (auto [v, e] : m.factors) {
            if (table.kind(v) == VarKind::POrbit) {
                ps.factors.emplace_back(v, e);
                for (int k = 0; k < e; ++k) p_factors.push_back(v);
            } else {
                rest.factors.emplace_back(v, e);
            }
        }
        // m = s · rest · ps as a super-commutative product.
        auto split = multiply_monomials(table, rest, ps);
        int s = split->first;
        GradedSeries acc = g_t;
        for (auto it = p_factors.rbegin(); it != p_factors.rend() && !acc.is_zero(); ++it)
            acc = left_p(acc, *it, hbar);
        if (acc.is_zero()) continue;
        acc = GradedSeries::monomial(f.table(), rest, s > 0 ? c : Rational(-c), trunc) * acc;
        out += acc;
    }
    return out;
}

GradedSeries weyl_commutator(const GradedSeries& f, const GradedSeries& g)
{
    auto trunc = meet(f.truncation(), g.truncation());
    if (trunc.max_hbar_order < 1)
        throw TruncationOverflow("weyl commutator needs max_hbar_order >= 1 (got "
                                 + std::to_string(trunc.max_hbar_order) + ")");
    return by_parity(f, g, [](const GradedSeries& a, int pa, const GradedSeries& b, int pb) {
        auto ab = star_product(a, b);
        auto ba = star_product(b, a);
        return (pa & pb & 1) ? ab + ba : ab - ba;
    });
}

} // namespace sftrec
