#include <sftrec/divcomb.hpp>
#include <sftrec/errors.hpp>

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <sstream>

namespace sftrec {

int Splitting::r2() const
{
    return std::popcount(J);
}

int Splitting::P2() const
{
    return std::popcount(plus2) + std::popcount(minus2);
}

namespace {

std::string mask_list(std::uint32_t mask, int count, const char* prefix)
{
    std::string s;
    for (int k = 0; k < count; ++k)
        if ((mask >> k) & 1u) s += (s.empty() ? "" : ",") + std::string(prefix) + std::to_string(k + 1);
    return s;
}

void check_space(const SplitSpace& s)
{
    if (s.r < 1 || s.n_plus < 0 || s.n_minus < 0) throw InvalidInput("split space needs r >= 1 and nonnegative puncture counts");
    if (s.i < 1 || s.i > s.r) throw InvalidInput("psi point outside 1..r");
    if (s.r + s.P() > 24) throw InvalidInput("split space too large to enumerate");
}

template <class F>
void for_each_splitting(const SplitSpace& s, F&& f)
{
    std::uint32_t ibit = 1u << (s.i - 1);
    std::uint32_t all = (1u << s.r) - 1;
    for (std::uint32_t J = 0; J <= all; ++J) {
        if (J & ibit) continue;
        for (std::uint32_t p = 0; p < (1u << s.n_plus); ++p)
            for (std::uint32_t m = 0; m < (1u << s.n_minus); ++m) f(Splitting{J, p, m});
    }
}

Rational choose2(int n)
{
    return make_rational(n * (n - 1), 2);
}

} // namespace

std::string to_string(const SplitSpace& space, const Splitting& s)
{
    std::uint32_t all = (1u << space.r) - 1;
    std::uint32_t pall = (1u << space.n_plus) - 1, mall = (1u << space.n_minus) - 1;
    auto side = [&](std::uint32_t J, std::uint32_t p, std::uint32_t m) {
        std::string out = mask_list(J, space.r, "");
        for (auto part : {mask_list(p, space.n_plus, "+"), mask_list(m, space.n_minus, "-")})
            if (!part.empty()) out += (out.empty() ? "" : ",") + part;
        return out;
    };
    return "D(" + side(all & ~s.J, pall & ~s.plus2, mall & ~s.minus2) + "|" + side(s.J, s.plus2, s.minus2) + ")";
}

Rational DivisorExpression::coefficient(const Splitting& s) const
{
    auto it = terms.find(s);
    return it == terms.end() ? Rational(0) : it->second;
}

void DivisorExpression::add(const Splitting& s, const Rational& c)
{
    if (c == 0) return;
    auto& slot = terms[s];
    slot += c;
    if (slot == 0) terms.erase(s);
}

DivisorExpression averaged_psi(int n, int i)
{
    if (n < 3) throw InvalidInput("averaged psi needs n >= 3 points");
    SplitSpace space{n, i, 0, 0};
    check_space(space);
    DivisorExpression e{space, {}};
    Rational base = Rational(factorial(static_cast<unsigned>(n - 3))) / Rational(factorial(static_cast<unsigned>(n - 1)));
    for_each_splitting(space, [&](const Splitting& s) {
        int k = s.r2();
        if (k >= 2 && k <= n - 2) e.add(s, base * k * (k - 1));
    });
    return e;
}

ZeroLocus averaged_map_zero_locus(const SplitSpace& space, MapVariant variant)
{
    check_space(space);
    int r = space.r, P = space.P();
    ZeroLocus out{0, {space, {}}};
    switch (variant) {
    case MapVariant::A: out.lhs = choose2(P); break;
    case MapVariant::B: out.lhs = (r - 1) * choose2(P + 1); break;
    case MapVariant::C: out.lhs = choose2(r - 1) * choose2(P + 2); break;
    }
    for_each_splitting(space, [&](const Splitting& s) {
        int r2 = s.r2(), r1 = r - r2, P2 = s.P2();
        Rational c;
        switch (variant) {
        case MapVariant::A: c = choose2(P2); break;
        case MapVariant::B: c = r2 * choose2(P2 + 1) + (r1 - 1) * choose2(P2); break;
        case MapVariant::C:
            c = choose2(r2) * choose2(P2 + 2) + r2 * (r1 - 1) * choose2(P2 + 1) + choose2(r1 - 1) * choose2(P2);
            break;
        }
        out.expr.add(s, c);
    });
    return out;
}

std::vector<TargetRule> simplified_targets(const SplitSpace& space)
{
    int r = space.r, P = space.P();
    return {
        {"P2(P2-1)/2", choose2(P), [](int, int, int P2) { return choose2(P2); }},
        {"r2*P2", Rational((r - 1) * P), [](int, int r2, int P2) { return Rational(r2 * P2); }},
        {"r2(r2-1)/2", choose2(r - 1), [](int, int r2, int) { return choose2(r2); }},
    };
}

namespace {

// rank of rows, optionally with the right-hand side column
int rank_of(std::vector<std::vector<Rational>> rows, std::size_t cols)
{
    int rank = 0;
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
        auto piv = std::find_if(rows.begin() + rank, rows.end(), [&](const auto& row) { return row[c] != 0; });
        if (piv == rows.end()) continue;
        std::iter_swap(rows.begin() + rank, piv);
        auto& p = rows[static_cast<std::size_t>(rank)];
        for (std::size_t k = static_cast<std::size_t>(rank) + 1; k < rows.size(); ++k) {
            if (rows[k][c] == 0) continue;
            Rational f = rows[k][c] / p[c];
            for (std::size_t j = c; j < rows[k].size(); ++j) rows[k][j] -= f * p[j];
        }
        ++rank;
    }
    return rank;
}

bool consistent(const std::vector<std::vector<Rational>>& rows, std::size_t unknowns)
{
    return rank_of(rows, unknowns) == rank_of(rows, unknowns + 1);
}

std::vector<Rational> particular_solution(std::vector<std::vector<Rational>> rows, std::size_t unknowns)
{
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < unknowns && rank < rows.size(); ++c) {
        auto piv = std::find_if(rows.begin() + static_cast<long>(rank), rows.end(), [&](const auto& row) { return row[c] != 0; });
        if (piv == rows.end()) continue;
        std::iter_swap(rows.begin() + static_cast<long>(rank), piv);
        Rational inv = 1 / rows[rank][c];
        for (auto& x : rows[rank]) x *= inv;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (k == rank || rows[k][c] == 0) continue;
            Rational f = rows[k][c];
            for (std::size_t j = 0; j <= unknowns; ++j) rows[k][j] -= f * rows[rank][j];
        }
        pivots.push_back(c);
        ++rank;
    }
    std::vector<Rational> x(unknowns, Rational(0));
    for (std::size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = rows[k][unknowns];
    return x;
}

} // namespace

CombinationResult solve_combination(const std::vector<ZeroLocus>& exprs, const TargetRule& target)
{
    if (exprs.empty()) throw InvalidInput("no expressions to combine");
    const SplitSpace& space = exprs.front().expr.space;
    for (const auto& e : exprs)
        if (e.expr.space != space) throw InvalidInput("expressions over different splitting sets");
    std::size_t m = exprs.size();

    std::map<std::vector<Rational>, std::string> unique_rows;
    bool any = false;
    for_each_splitting(space, [&](const Splitting& s) {
        std::vector<Rational> row;
        for (const auto& e : exprs) row.push_back(e.expr.coefficient(s));
        row.push_back(target.coefficient(space.r - s.r2(), s.r2(), s.P2()));
        bool nonzero = std::any_of(row.begin(), row.end(), [](const Rational& x) { return x != 0; });
        if (!nonzero) return;
        any = true;
        unique_rows.try_emplace(row, to_string(space, s));
    });
    if (!any) throw InvalidInput("empty splitting set");
    {
        std::vector<Rational> row;
        for (const auto& e : exprs) row.push_back(e.lhs);
        row.push_back(target.lhs);
        unique_rows.try_emplace(row, "lhs");
    }

    std::vector<std::vector<Rational>> rows;
    std::vector<std::string> labels;
    for (const auto& [row, label] : unique_rows) {
        rows.push_back(row);
        labels.push_back(label);
    }

    CombinationResult out;
    if (consistent(rows, m)) {
        out.feasible = true;
        out.weights = particular_solution(rows, m);
        return out;
    }
    // deletion filter down to a minimal inconsistent subset
    std::vector<bool> keep(rows.size(), true);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        keep[k] = false;
        std::vector<std::vector<Rational>> sub;
        for (std::size_t j = 0; j < rows.size(); ++j)
            if (keep[j]) sub.push_back(rows[j]);
        if (consistent(sub, m)) keep[k] = true;
    }
    for (std::size_t k = 0; k < rows.size(); ++k)
        if (keep[k]) out.certificate.push_back(labels[k]);
    return out;
}

DivisorPair make_pair_divisor(int a, int b)
{
    if (a == b || a < 1 || b < 1 || a > 5 || b > 5) throw InvalidInput("divisor pair must be two distinct points of 1..5");
    return {std::min(a, b), std::max(a, b)};
}

DivisorPair m05_divisor(const SplitSpace& space, const Splitting& s)
{
    if (space.r != 5 || space.P() != 0) throw InvalidInput("splitting is not a boundary divisor of M05");
    std::uint32_t side = s.r2() == 2 ? s.J : (s.r2() == 3 ? (0x1Fu & ~s.J) : 0u);
    if (!side) throw InvalidInput("splitting is not a boundary divisor of M05");
    int a = std::countr_zero(side) + 1;
    int b = 32 - std::countl_zero(side);
    return make_pair_divisor(a, b);
}

int m05_pairing(DivisorPair a, DivisorPair b)
{
    if (a == b) return -1;
    if (a.first == b.first || a.first == b.second || a.second == b.first || a.second == b.second) return 0;
    return 1;
}

Rational intersection_pairing_M05(const DivisorExpression& a, const DivisorExpression& b)
{
    Rational total = 0;
    for (const auto& [sa, ca] : a.terms)
        for (const auto& [sb, cb] : b.terms)
            total += ca * cb * m05_pairing(m05_divisor(a.space, sa), m05_divisor(b.space, sb));
    return total;
}

namespace {

std::string name(DivisorPair d)
{
    return "D" + std::to_string(d.first) + std::to_string(d.second);
}

DivisorPair permute(DivisorPair d, const std::vector<int>& perm)
{
    return make_pair_divisor(perm[static_cast<std::size_t>(d.first)], perm[static_cast<std::size_t>(d.second)]);
}

bool contains(DivisorPair d, int p)
{
    return d.first == p || d.second == p;
}

} // namespace

PerturbationLedger symmetrize(const PerturbationLedger& ledger)
{
    PerturbationLedger out;
    out.psi_point = ledger.psi_point;
    std::vector<int> others;
    for (int k = 1; k <= 5; ++k)
        if (k != ledger.psi_point) others.push_back(k);
    auto perm_others = others;
    auto entry_key = [](const LedgerEntry& e) {
        std::vector<std::pair<DivisorPair, Rational>> pts;
        for (const auto& p : e.points) pts.emplace_back(p.location, p.index);
        std::sort(pts.begin(), pts.end());
        return std::make_tuple(e.perturbed, e.weight, e.target, pts);
    };
    auto restriction_key = [](const RestrictionEntry& r) {
        std::vector<std::tuple<DivisorPair, DivisorPair, Rational>> cs;
        for (const auto& c : r.contributions) cs.emplace_back(c.location, c.source, c.index);
        std::sort(cs.begin(), cs.end());
        return std::make_pair(r.divisor, cs);
    };
    std::set<decltype(entry_key(LedgerEntry{}))> seen_e;
    std::set<decltype(restriction_key(RestrictionEntry{}))> seen_r;
    do {
        std::vector<int> perm(6, 0);
        perm[static_cast<std::size_t>(ledger.psi_point)] = ledger.psi_point;
        for (std::size_t k = 0; k < others.size(); ++k) perm[static_cast<std::size_t>(others[k])] = perm_others[k];
        for (const auto& e : ledger.entries) {
            LedgerEntry img{permute(e.perturbed, perm), e.weight, permute(e.target, perm), {}};
            for (const auto& p : e.points) img.points.push_back({permute(p.location, perm), p.index});
            if (seen_e.insert(entry_key(img)).second) out.entries.push_back(std::move(img));
        }
        for (const auto& r : ledger.restrictions) {
            RestrictionEntry img{permute(r.divisor, perm), {}};
            for (const auto& c : r.contributions)
                img.contributions.push_back({permute(c.location, perm), permute(c.source, perm), c.index});
            if (seen_r.insert(restriction_key(img)).second) out.restrictions.push_back(std::move(img));
        }
    } while (std::next_permutation(perm_others.begin(), perm_others.end()));
    return out;
}

LedgerReport perturbation_ledger_check(const PerturbationLedger& ledger)
{
    LedgerReport rep;
    int psi = ledger.psi_point;
    if (psi < 1 || psi > 5) throw InvalidInput("psi point outside 1..5");
    for (const auto& e : ledger.entries) {
        std::string label = to_string(e.weight) + "*" + name(e.perturbed) + " on " + name(e.target);
        Rational sum = 0;
        for (const auto& p : e.points) {
            if (m05_pairing(e.target, p.location) != 1)
                rep.violations.push_back(label + ": " + name(e.target) + "∩" + name(p.location) + " is not an intersection point");
            sum += p.index;
        }
        Rational expected = e.weight * m05_pairing(e.perturbed, e.target);
        ++rep.sums_checked;
        if (sum != expected)
            rep.violations.push_back(label + ": indices sum to " + to_string(sum) + ", expected " + to_string(expected));
    }

    auto reference = averaged_psi(4, 1);
    for (const auto& r : ledger.restrictions) {
        std::map<DivisorPair, Rational> totals;
        for (const auto& c : r.contributions) {
            if (m05_pairing(r.divisor, c.location) != 1)
                rep.violations.push_back("restriction to " + name(r.divisor) + ": " + name(c.location) + " does not meet it");
            totals[c.location] += c.index;
        }
        if (contains(r.divisor, psi)) {
            for (const auto& [loc, t] : totals) {
                ++rep.sums_checked;
                if (t != 0)
                    rep.violations.push_back("restriction to " + name(r.divisor) + " at " + name(loc) + ": total "
                                             + to_string(t) + ", expected 0");
            }
            continue;
        }
        // the divisor is M̄₀,₄ on {psi, b, c, node}; relabel to {1, 2, 3, 4}
        std::vector<int> rest;
        for (int k = 1; k <= 5; ++k)
            if (k != psi && !contains(r.divisor, k)) rest.push_back(k);
        auto label_of = [&](int k) { return k == psi ? 1 : (k == rest[0] ? 2 : 3); };
        for (int a = 1; a <= 5; ++a)
            for (int b = a + 1; b <= 5; ++b) {
                DivisorPair loc{a, b};
                if (m05_pairing(r.divisor, loc) != 1) continue;
                // the side of the M̄₀,₄ splitting containing the psi point
                int partner = contains(loc, psi) ? label_of(loc.first == psi ? loc.second : loc.first) : 4;
                std::uint32_t J = 0xFu & ~((1u << 0) | (1u << (partner - 1)));
                Rational expected = reference.coefficient(Splitting{J, 0, 0});
                Rational got = totals.count(loc) ? totals[loc] : Rational(0);
                ++rep.sums_checked;
                if (got != expected)
                    rep.violations.push_back("restriction to " + name(r.divisor) + " at " + name(loc) + ": total "
                                             + to_string(got) + ", expected " + to_string(expected));
            }
    }
    return rep;
}

bool combination_matches(const std::vector<ZeroLocus>& exprs, const std::vector<Rational>& weights, const TargetRule& target)
{
    if (exprs.empty() || exprs.size() != weights.size()) throw InvalidInput("one weight per expression required");
    const auto& sp = exprs.front().expr.space;
    Rational lhs = 0;
    DivisorExpression sum{sp, {}};
    for (std::size_t k = 0; k < exprs.size(); ++k) {
        if (!(exprs[k].expr.space == sp)) throw InvalidInput("expressions live on different spaces");
        lhs += weights[k] * exprs[k].lhs;
        for (const auto& [s, c] : exprs[k].expr.terms) sum.add(s, weights[k] * c);
    }
    if (lhs != target.lhs) return false;
    for (std::uint32_t J = 0; J < (1u << sp.r); ++J) {
        if (J & (1u << (sp.i - 1))) continue;
        for (std::uint32_t p = 0; p < (1u << sp.n_plus); ++p)
            for (std::uint32_t m = 0; m < (1u << sp.n_minus); ++m) {
                Splitting s{J, p, m};
                if (sum.coefficient(s) != target.coefficient(sp.r - s.r2(), s.r2(), s.P2())) return false;
            }
    }
    return true;
}

} // namespace sftrec
