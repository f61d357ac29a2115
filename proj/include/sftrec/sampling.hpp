#pragma once

#include <sftrec/series.hpp>

#include <random>
#include <vector>

namespace sftrec {

// q1,p1 odd (CZ = 1), q2,p2 even (CZ = 2 shifted), one odd and one even t, ħ; m = 3.
inline TablePtr mixed_table(int kappa1 = 1, int kappa2 = 2)
{
    std::vector<VariableSpec> specs = {
        {"q1", VarKind::QOrbit, {1, 1}, q_degree(3, 1), kappa1},
        {"p1", VarKind::POrbit, {1, 1}, p_degree(3, 1), kappa1},
        {"q2", VarKind::QOrbit, {2, 1}, q_degree(3, 2), kappa2},
        {"p2", VarKind::POrbit, {2, 1}, p_degree(3, 2), kappa2},
        {"s", VarKind::T, {0, 0}, t_degree(0, 1), 1},
        {"u", VarKind::T, {1, 0}, t_degree(0, 2), 1},
        {"hbar", VarKind::Hbar, {}, hbar_degree(3), 1},
    };
    return VariableTable::declare(std::move(specs), 3);
}

class RandomSeries
{
public:
    explicit RandomSeries(TablePtr table, unsigned seed) : table_(std::move(table)), rng_(seed) {}

    // Random series in the listed variables, exponents ≤ max_exp (odd variables ≤ 1).
    GradedSeries make(const std::vector<VarId>& vars, int max_terms = 4, int max_exp = 2)
    {
        for (;;) {
            auto s = attempt(vars, max_terms, max_exp);
            if (!s.is_zero()) return s;
        }
    }

    GradedSeries attempt(const std::vector<VarId>& vars, int max_terms, int max_exp)
    {
        GradedSeries s(table_);
        std::uniform_int_distribution<int> nterms(1, max_terms), coef(-5, 5), den(1, 3);
        int n = nterms(rng_);
        for (int k = 0; k < n; ++k) {
            Monomial m;
            for (VarId v : vars) {
                int top = table_->odd(v) ? 1 : max_exp;
                int e = std::uniform_int_distribution<int>(0, top)(rng_);
                if (e) m.factors.emplace_back(v, e);
            }
            int c = coef(rng_);
            s.add_term(m, make_rational(c == 0 ? 1 : c, den(rng_)));
        }
        return s;
    }

    GradedSeries homogeneous(const std::vector<VarId>& vars, int parity, int max_terms = 4)
    {
        for (;;) {
            auto s = make(vars, max_terms).parity_part(parity);
            if (!s.is_zero()) return s;
        }
    }

    std::mt19937& rng() { return rng_; }

private:
    TablePtr table_;
    std::mt19937 rng_;
};

} // namespace sftrec
