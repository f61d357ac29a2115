#include <sftrec/gwrecon.hpp>
#include <sftrec/ops.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace sftrec {

std::optional<RationalMatrix> invert(const RationalMatrix& m)
{
    std::size_t n = m.size();
    RationalMatrix a = m, inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) return std::nullopt;
        inv[i][i] = 1;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Rational scale = 1 / a[col][col];
        for (std::size_t k = 0; k < n; ++k) {
            a[col][k] *= scale;
            inv[col][k] *= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

CorrelatorKey::CorrelatorKey(std::vector<Insertion> ins, std::vector<int> d)
    : insertions(std::move(ins)), degree(std::move(d))
{
    std::sort(insertions.begin(), insertions.end());
}

int CorrelatorKey::total_degree() const
{
    int s = 0;
    for (int x : degree) s += x;
    return s;
}

int TargetModel::class_index(const std::string& id) const
{
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (basis[k].id == id) return static_cast<int>(k);
    throw InvalidInput("unknown class '" + id + "' in model '" + name + "'");
}

const RationalMatrix& TargetModel::eta_inverse() const
{
    if (!eta_inv_) {
        auto inv = invert(eta);
        if (!inv) throw InvalidInput("eta not invertible");
        eta_inv_ = std::move(*inv);
    }
    return *eta_inv_;
}

bool TargetModel::passes_dimension(const CorrelatorKey& key) const
{
    int lhs = 0;
    for (auto [c, a] : key.insertions) lhs += basis[static_cast<std::size_t>(c)].degree + 2 * a;
    int rhs = dim - 6 + 2 * key.points();
    for (std::size_t k = 0; k < key.degree.size(); ++k) rhs += 2 * chern[k] * key.degree[k];
    return lhs == rhs;
}

namespace {

Rational eta_entry(const TargetModel& m, int a, int b)
{
    return m.eta[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

bool is_zero_degree(const std::vector<int>& d)
{
    return std::all_of(d.begin(), d.end(), [](int x) { return x == 0; });
}

} // namespace

void TargetModel::validate() const
{
    auto fail = [&](const std::string& field, const std::string& msg) {
        throw InvalidInput("model '" + name + "': " + field + ": " + msg);
    };
    std::size_t n = basis.size();
    if (n == 0) fail("basis", "empty");
    std::set<std::string> ids;
    for (const auto& b : basis)
        if (!ids.insert(b.id).second) fail("basis", "duplicate class id '" + b.id + "'");
    if (unit < 0 || static_cast<std::size_t>(unit) >= n) fail("unit", "index out of range");
    if (basis[static_cast<std::size_t>(unit)].degree != 0) fail("unit", "unit class must have degree 0");
    if (divisor) {
        if (*divisor < 0 || static_cast<std::size_t>(*divisor) >= n) fail("divisor", "index out of range");
        if (basis[static_cast<std::size_t>(*divisor)].degree != 2) fail("divisor", "divisor class must have degree 2");
        if (divisor_pairing.size() != chern.size()) fail("divisor_pairing", "length differs from h2 rank");
        if (divisor_cup.size() != n) fail("divisor_cup", "wrong number of rows");
        for (const auto& row : divisor_cup)
            if (row.size() != n) fail("divisor_cup", "wrong number of columns");
    }
    if (eta.size() != n) fail("eta", "wrong number of rows");
    for (std::size_t a = 0; a < n; ++a) {
        if (eta[a].size() != n) fail("eta", "wrong number of columns");
        for (std::size_t b = 0; b < n; ++b) {
            int da = basis[a].degree, db = basis[b].degree;
            Rational sym = ((da & db) & 1) ? Rational(-eta[b][a]) : eta[b][a];
            if (eta[a][b] != sym) fail("eta", "not graded-symmetric");
            if (eta[a][b] != 0 && da + db != dim)
                fail("eta", "nonzero pairing between classes whose degrees do not sum to dim");
        }
    }
    if (!invert(eta)) fail("eta", "eta not invertible");

    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
    for (std::size_t k = 0; k < primaries.size(); ++k) {
        const auto& p = primaries[k];
        std::string field = "primaries[" + std::to_string(k) + "]";
        if (p.classes.size() < 3) fail(field, "fewer than 3 insertions");
        if (p.degree.size() != chern.size()) fail(field, "curve class length differs from h2 rank");
        for (int d : p.degree)
            if (d < 0) fail(field, "negative curve class exponent");
        std::vector<Insertion> ins;
        for (int c : p.classes) {
            if (c < 0 || static_cast<std::size_t>(c) >= n) fail(field, "class index out of range");
            ins.push_back({c, 0});
        }
        CorrelatorKey key(ins, p.degree);
        if (!passes_dimension(key)) fail(field, "violates the dimension axiom");
        std::vector<int> sorted = p.classes;
        std::sort(sorted.begin(), sorted.end());
        if (!seen.insert({sorted, p.degree}).second) fail(field, "duplicate primary");
        bool has_unit = std::count(sorted.begin(), sorted.end(), unit) > 0;
        if (has_unit) {
            Rational expected = 0;
            if (sorted.size() == 3 && is_zero_degree(p.degree)) {
                std::vector<int> rest = sorted;
                rest.erase(std::find(rest.begin(), rest.end(), unit));
                expected = eta_entry(*this, rest[0], rest[1]);
            }
            if (p.value != expected) fail(field, "unit insertion inconsistent with the string equation");
        }
        if (divisor && sorted.size() >= 4 && std::count(sorted.begin(), sorted.end(), *divisor) > 0)
            fail(field, "divisor insertion with 4 or more points is determined by the divisor equation");
    }
}

TargetModel TargetModel::point()
{
    TargetModel m;
    m.name = "point";
    m.dim = 0;
    m.basis = {{"1", 0}};
    m.unit = 0;
    m.eta = {{Rational(1)}};
    m.primaries = {{{0, 0, 0}, {}, Rational(1)}};
    m.primary_max_points = 3;
    m.primary_max_degree = 0;
    return m;
}

TargetModel TargetModel::p1_toy()
{
    TargetModel m;
    m.name = "p1-toy";
    m.dim = 2;
    m.basis = {{"1", 0}, {"e", 2}};
    m.unit = 0;
    m.divisor = 1;
    m.eta = {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}};
    m.chern = {2};
    m.divisor_pairing = {Rational(1)};
    m.divisor_cup = {{Rational(0), Rational(1)}, {Rational(0), Rational(0)}};
    m.primaries = {{{0, 0, 1}, {0}, Rational(1)}, {{1, 1, 1}, {1}, Rational(1)}};
    m.primary_max_points = 3;
    m.primary_max_degree = 1 << 20;
    return m;
}

std::string describe(const TargetModel& model, const CorrelatorKey& key)
{
    std::ostringstream os;
    os << "<";
    for (std::size_t k = 0; k < key.insertions.size(); ++k) {
        auto [c, a] = key.insertions[k];
        os << (k ? " " : "") << "tau" << a << "(" << model.basis[static_cast<std::size_t>(c)].id << ")";
    }
    os << ">_(";
    for (std::size_t k = 0; k < key.degree.size(); ++k) os << (k ? "," : "") << key.degree[k];
    os << ")";
    return os.str();
}

Rational CorrelatorTable::value(const CorrelatorKey& key) const
{
    auto it = entries_.find(key);
    return it == entries_.end() ? Rational(0) : it->second;
}

void CorrelatorTable::set(const CorrelatorKey& key, const Rational& v)
{
    if (v == 0) entries_.erase(key);
    else entries_[key] = v;
}

bool CorrelatorTable::within_bounds(const CorrelatorKey& key) const
{
    if (key.points() > bounds_.max_points || key.total_degree() > bounds_.max_degree) return false;
    return std::all_of(key.insertions.begin(), key.insertions.end(),
                       [&](const Insertion& i) { return i.level <= bounds_.max_level; });
}

Reconstructor::Reconstructor(TargetModel model, ReconstructionBounds bounds)
    : model_(std::move(model)), bounds_(bounds)
{
    model_.validate();
    for (const auto& b : model_.basis)
        if (b.degree & 1) throw InvalidInput("reconstruction supports even-degree classes only");
    for (const auto& p : model_.primaries) {
        auto sorted = p.classes;
        std::sort(sorted.begin(), sorted.end());
        primaries_[{sorted, p.degree}] = p.value;
    }
}

Rational Reconstructor::value(const CorrelatorKey& key)
{
    if (key.degree.size() != static_cast<std::size_t>(model_.h2_rank()))
        throw InvalidInput("curve class length differs from h2 rank");
    for (int d : key.degree)
        if (d < 0) throw InvalidInput("negative curve class exponent");
    if (key.points() > bounds_.max_points || key.total_degree() > bounds_.max_degree)
        throw BoundOverflow("correlator " + describe(model_, key) + " exceeds reconstruction bounds");
    for (auto i : key.insertions)
        if (i.level > bounds_.max_level)
            throw BoundOverflow("correlator " + describe(model_, key) + " exceeds the descendant level bound");
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Rational v = compute(key);
    memo_.emplace(key, v);
    return v;
}

Rational Reconstructor::compute(const CorrelatorKey& key)
{
    if (key.points() < 3 || !model_.passes_dimension(key)) return 0;
    std::size_t desc = 0;
    for (std::size_t k = 1; k < key.insertions.size(); ++k)
        if (key.insertions[k].level > key.insertions[desc].level) desc = k;
    if (key.insertions[desc].level == 0) return primary(key);
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < key.insertions.size() && others.size() < 2; ++k)
        if (k != desc) others.push_back(k);
    return trr_split(key, desc, others[0], others[1]);
}

Rational Reconstructor::trr_split(const CorrelatorKey& key, std::size_t desc, std::size_t b, std::size_t c)
{
    const auto& ins = key.insertions;
    if (desc >= ins.size() || b >= ins.size() || c >= ins.size() || desc == b || desc == c || b == c)
        throw InvalidInput("TRR split needs three distinct insertion positions");
    if (ins[desc].level < 1) throw InvalidInput("TRR split needs a descendant insertion");
    std::vector<Insertion> rest;
    for (std::size_t k = 0; k < ins.size(); ++k)
        if (k != desc && k != b && k != c) rest.push_back(ins[k]);
    const auto& einv = model_.eta_inverse();
    std::size_t nb = model_.basis.size();
    Insertion lowered{ins[desc].cls, ins[desc].level - 1};
    const auto& d = key.degree;

    Rational total = 0;
    std::vector<int> d1(d.size(), 0);
    std::function<void(std::size_t)> over_degrees = [&](std::size_t pos) {
        if (pos < d.size()) {
            for (int x = 0; x <= d[pos]; ++x) {
                d1[pos] = x;
                over_degrees(pos + 1);
            }
            return;
        }
        std::vector<int> d2(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) d2[k] = d[k] - d1[k];
        for (unsigned mask = 0; mask < (1u << rest.size()); ++mask) {
            std::vector<Insertion> left{lowered}, right{ins[b], ins[c]};
            for (std::size_t k = 0; k < rest.size(); ++k) ((mask >> k) & 1 ? left : right).push_back(rest[k]);
            for (std::size_t mu = 0; mu < nb; ++mu) {
                auto l = left;
                l.push_back({static_cast<int>(mu), 0});
                Rational lv = value(CorrelatorKey(l, d1));
                if (lv == 0) continue;
                for (std::size_t nu = 0; nu < nb; ++nu) {
                    if (einv[mu][nu] == 0) continue;
                    auto r = right;
                    r.push_back({static_cast<int>(nu), 0});
                    Rational rv = value(CorrelatorKey(r, d2));
                    if (rv != 0) total += lv * einv[mu][nu] * rv;
                }
            }
        }
    };
    over_degrees(0);
    return total;
}

Rational Reconstructor::primary(const CorrelatorKey& key)
{
    std::vector<int> classes;
    for (auto i : key.insertions) classes.push_back(i.cls);
    int unit = model_.unit;
    auto unit_it = std::find(classes.begin(), classes.end(), unit);
    if (unit_it != classes.end()) {
        if (classes.size() == 3 && is_zero_degree(key.degree)) {
            classes.erase(unit_it);
            return eta_entry(model_, classes[0], classes[1]);
        }
        return 0;
    }
    if (model_.divisor && classes.size() >= 4) {
        auto it = std::find(classes.begin(), classes.end(), *model_.divisor);
        if (it != classes.end()) {
            Rational pairing = 0;
            for (std::size_t k = 0; k < key.degree.size(); ++k)
                pairing += model_.divisor_pairing[k] * key.degree[k];
            if (pairing == 0) return 0;
            std::vector<Insertion> rest;
            bool dropped = false;
            for (auto i : key.insertions) {
                if (!dropped && i.cls == *model_.divisor) {
                    dropped = true;
                    continue;
                }
                rest.push_back(i);
            }
            return pairing * value(CorrelatorKey(rest, key.degree));
        }
    }
    auto it = primaries_.find({classes, key.degree});
    if (it != primaries_.end()) return it->second;
    if (key.points() <= model_.primary_max_points && key.total_degree() <= model_.primary_max_degree) return 0;
    throw MissingPrimary(describe(model_, key));
}

std::vector<CorrelatorKey> Reconstructor::enumerate_keys() const
{
    std::vector<Insertion> types;
    for (int c = 0; c < static_cast<int>(model_.basis.size()); ++c)
        for (int a = 0; a <= bounds_.max_level; ++a) types.push_back({c, a});
    std::sort(types.begin(), types.end());

    std::vector<std::vector<int>> degrees;
    std::vector<int> d(static_cast<std::size_t>(model_.h2_rank()), 0);
    std::function<void(std::size_t, int)> gen_deg = [&](std::size_t pos, int budget) {
        if (pos == d.size()) {
            degrees.push_back(d);
            return;
        }
        for (int x = 0; x <= budget; ++x) {
            d[pos] = x;
            gen_deg(pos + 1, budget - x);
        }
    };
    gen_deg(0, bounds_.max_degree);

    std::vector<CorrelatorKey> keys;
    std::vector<Insertion> cur;
    std::function<void(std::size_t)> gen = [&](std::size_t start) {
        if (cur.size() >= 3)
            for (const auto& dd : degrees) {
                CorrelatorKey k(cur, dd);
                if (model_.passes_dimension(k)) keys.push_back(std::move(k));
            }
        if (static_cast<int>(cur.size()) == bounds_.max_points) return;
        for (std::size_t t = start; t < types.size(); ++t) {
            cur.push_back(types[t]);
            gen(t);
            cur.pop_back();
        }
    };
    gen(0);
    std::sort(keys.begin(), keys.end());
    return keys;
}

CorrelatorTable Reconstructor::table()
{
    CorrelatorTable t(bounds_, model_.h2_rank());
    for (const auto& key : enumerate_keys()) t.set(key, value(key));
    return t;
}

CorrelatorTable reconstruct(const TargetModel& model, const ReconstructionBounds& bounds)
{
    Reconstructor r(model, bounds);
    return r.table();
}

PotentialSpace::PotentialSpace(const TargetModel& model, int max_level, std::optional<int> tcheck_shift)
    : model_(model), max_level_(max_level)
{
    std::vector<VariableSpec> specs;
    std::size_t n = model.basis.size();
    auto name = [&](const char* prefix, std::size_t c, int j) {
        return std::string(prefix) + "_" + model.basis[c].id + "_" + std::to_string(j);
    };
    if (tcheck_shift)
        for (std::size_t c = 0; c < n; ++c)
            for (int j = 0; j <= max_level; ++j)
                specs.push_back({name("tc", c, j), VarKind::TCheck, {static_cast<int>(c), j},
                                 t_degree(j, model.basis[c].degree) + *tcheck_shift, 1});
    for (std::size_t c = 0; c < n; ++c)
        for (int j = 0; j <= max_level; ++j)
            specs.push_back({name("t", c, j), VarKind::T, {static_cast<int>(c), j}, t_degree(j, model.basis[c].degree), 1});
    for (int k = 0; k < model.h2_rank(); ++k)
        specs.push_back({"z" + std::to_string(k), VarKind::Z, {k}, z_degree(model.chern[static_cast<std::size_t>(k)]), 1});
    table_ = VariableTable::declare(std::move(specs), (model.dim + 1) / 2);

    t_.assign(n, std::vector<VarId>(static_cast<std::size_t>(max_level + 1)));
    if (tcheck_shift) tc_.assign(n, std::vector<VarId>(static_cast<std::size_t>(max_level + 1)));
    for (std::size_t c = 0; c < n; ++c)
        for (int j = 0; j <= max_level; ++j) {
            t_[c][static_cast<std::size_t>(j)] = *table_->find(VarKind::T, {static_cast<int>(c), j});
            if (tcheck_shift)
                tc_[c][static_cast<std::size_t>(j)] = *table_->find(VarKind::TCheck, {static_cast<int>(c), j});
        }
    for (int k = 0; k < model.h2_rank(); ++k) z_.push_back(*table_->find(VarKind::Z, {k}));
}

VarId PotentialSpace::t(int cls, int level) const
{
    return t_.at(static_cast<std::size_t>(cls)).at(static_cast<std::size_t>(level));
}

std::optional<VarId> PotentialSpace::tcheck(int cls, int level) const
{
    if (tc_.empty() || level < 0 || level > max_level_) return std::nullopt;
    return tc_.at(static_cast<std::size_t>(cls)).at(static_cast<std::size_t>(level));
}

std::vector<VarId> PotentialSpace::t_variables() const
{
    std::vector<VarId> out;
    for (const auto& row : t_) out.insert(out.end(), row.begin(), row.end());
    return out;
}

GradedSeries PotentialSpace::dt(const GradedSeries& f, int cls, int level) const
{
    if (level < 0 || level > max_level_) return GradedSeries(f.table(), f.truncation());
    return graded_derivative(f, t(cls, level));
}

TruncationPolicy potential_truncation(const ReconstructionBounds& bounds)
{
    TruncationPolicy p;
    p.max_t_order = bounds.max_points;
    p.max_z_order = bounds.max_degree;
    return p;
}

GradedSeries assemble_potential(const CorrelatorTable& table, const PotentialSpace& space)
{
    GradedSeries f(space.table(), potential_truncation(table.bounds()));
    for (const auto& [key, v] : table.entries()) {
        std::map<Insertion, int> mult;
        for (auto i : key.insertions) ++mult[i];
        Rational aut = 1;
        GradedSeries term = GradedSeries::constant(space.table(), 1, f.truncation());
        for (auto [i, k] : mult) {
            aut *= factorial(static_cast<unsigned>(k));
            Monomial m{{{space.t(i.cls, i.level), k}}};
            term = term * GradedSeries::monomial(space.table(), m, 1, f.truncation());
        }
        Monomial zm;
        for (std::size_t k = 0; k < key.degree.size(); ++k)
            if (key.degree[k]) zm.factors.emplace_back(space.z(static_cast<int>(k)), key.degree[k]);
        term = term * GradedSeries::monomial(space.table(), zm, v / aut, f.truncation());
        f += term;
    }
    return f;
}

namespace {

TruncationPolicy exact_orders(const ReconstructionBounds& bounds, int lost)
{
    TruncationPolicy p;
    p.max_t_order = std::max(bounds.max_points - lost, -1);
    p.max_z_order = bounds.max_degree;
    return p;
}

// Σ_{μν} A_μ η^{μν} B_ν
GradedSeries contract(const PotentialSpace& space, const std::vector<GradedSeries>& a,
                      const std::vector<GradedSeries>& b)
{
    const auto& einv = space.model().eta_inverse();
    GradedSeries out(a.front().table(), meet(a.front().truncation(), b.front().truncation()));
    for (std::size_t mu = 0; mu < a.size(); ++mu) {
        if (a[mu].is_zero()) continue;
        for (std::size_t nu = 0; nu < b.size(); ++nu)
            if (einv[mu][nu] != 0 && !b[nu].is_zero()) out += einv[mu][nu] * (a[mu] * b[nu]);
    }
    return out;
}

} // namespace

GradedSeries verify_trr(const GradedSeries& f, const PotentialSpace& space, const ReconstructionBounds& bounds,
                        Insertion a, Insertion b, Insertion c)
{
    if (a.level < 1) throw InvalidInput("TRR needs a descendant level i >= 1");
    std::size_t nb = space.model().basis.size();
    auto lhs = space.dt(space.dt(space.dt(f, a.cls, a.level), b.cls, b.level), c.cls, c.level);
    auto fa = space.dt(f, a.cls, a.level - 1);
    auto fbc = space.dt(space.dt(f, b.cls, b.level), c.cls, c.level);
    std::vector<GradedSeries> left, right;
    for (std::size_t mu = 0; mu < nb; ++mu) {
        left.push_back(space.dt(fa, static_cast<int>(mu), 0));
        right.push_back(space.dt(fbc, static_cast<int>(mu), 0));
    }
    return truncate(lhs - contract(space, left, right), exact_orders(bounds, 3));
}

GradedSeries verify_averaged_trr(const GradedSeries& f, const PotentialSpace& space, const ReconstructionBounds& bounds,
                                 Insertion a)
{
    if (a.level < 1) throw InvalidInput("TRR needs a descendant level i >= 1");
    std::size_t nb = space.model().basis.size();
    auto lhs = apply_N_N_minus_1(space.dt(f, a.cls, a.level));
    auto fa = space.dt(f, a.cls, a.level - 1);
    std::vector<GradedSeries> left, right;
    for (std::size_t mu = 0; mu < nb; ++mu) {
        left.push_back(space.dt(fa, static_cast<int>(mu), 0));
        right.push_back(apply_N_N_minus_1(space.dt(f, static_cast<int>(mu), 0)));
    }
    return truncate(lhs - contract(space, left, right), exact_orders(bounds, 2));
}

StringDilatonDivisorResiduals verify_string_dilaton_divisor(const GradedSeries& f, const PotentialSpace& space,
                                                            const ReconstructionBounds& bounds,
                                                            const StringDilatonDivisorOptions& options)
{
    const auto& model = space.model();
    int nb = static_cast<int>(model.basis.size());
    int L = space.max_level();
    auto tr = f.truncation();
    auto exact = exact_orders(bounds, 1);
    auto tv = [&](int c, int j) { return space.tvar(c, j, tr); };

    // Σ t^{α,k+1} ∂𝕗/∂t^{β,k} weighted by w(α,β)
    auto raise = [&](auto weight) {
        GradedSeries s(f.table(), tr);
        for (int al = 0; al < nb; ++al)
            for (int be = 0; be < nb; ++be) {
                Rational w = weight(al, be);
                if (w == 0) continue;
                for (int k = 0; k + 1 <= L; ++k) {
                    auto d = space.dt(f, be, k);
                    if (!d.is_zero()) s += w * (tv(al, k + 1) * d);
                }
            }
        return s;
    };
    auto quadratic = [&](auto pairing) {
        GradedSeries s(f.table(), tr);
        for (int al = 0; al < nb; ++al)
            for (int be = 0; be < nb; ++be) {
                Rational w = pairing(al, be);
                if (w != 0) s += (options.quadratic_factor * w) * (tv(al, 0) * tv(be, 0));
            }
        return s;
    };

    int u = model.unit;
    auto string = space.dt(f, u, 0)
                  - quadratic([&](int a, int b) { return eta_entry(model, a, b); })
                  - raise([](int a, int b) { return a == b ? Rational(1) : Rational(0); });

    GradedSeries dilaton(f.table(), tr);
    if (L >= 1) {
        auto two_minus_n = 2 * f + apply_euler(f);
        dilaton = space.dt(f, u, 1) + (options.standard_dilaton_sign ? two_minus_n : -two_minus_n);
    }

    std::optional<GradedSeries> divisor;
    if (model.divisor) {
        int D = *model.divisor;
        auto triple = [&](int a, int b) {
            Rational s = 0;
            for (int g = 0; g < nb; ++g)
                s += model.divisor_cup[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)] * eta_entry(model, g, b);
            return s;
        };
        GradedSeries zd(f.table(), tr);
        for (int k = 0; k < model.h2_rank(); ++k) {
            Rational w = model.divisor_pairing[static_cast<std::size_t>(k)];
            VarId z = space.z(k);
            if (w != 0)
                zd += w * (GradedSeries::variable(f.table(), z, tr) * graded_derivative(f, z));
        }
        auto res = space.dt(f, D, 0) - zd - quadratic(triple) - raise([&](int a, int b) {
                       return model.divisor_cup[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                   });
        // d ≠ 0 terms needing two-point invariants, which the recursion sets to zero
        auto tab = space.table();
        GradedSeries kept(f.table(), exact);
        for (const auto& [m, c] : res.terms()) {
            int t = count_exponent(m, [&](VarId v) { return tab->kind(v) == VarKind::T; });
            int z = count_exponent(m, [&](VarId v) { return tab->kind(v) == VarKind::Z; });
            int desc = count_exponent(m, [&](VarId v) { return tab->kind(v) == VarKind::T && (*tab)[v].indices[1] > 0; });
            if (z > 0 && (t == 2 || (desc > 0 && !options.divisor_descendants_positive_degree))) continue;
            kept.add_term(m, c);
        }
        divisor = kept;
    }
    return {truncate(string, exact), truncate(dilaton, exact), divisor};
}

StructureConstants quantum_product(const GradedSeries& f, const PotentialSpace& space)
{
    const auto& model = space.model();
    std::size_t nb = model.basis.size();
    auto tvars = space.t_variables();
    const auto& einv = model.eta_inverse();
    GradedSeries zero(f.table(), f.truncation());
    StructureConstants c(nb, std::vector<std::vector<GradedSeries>>(nb, std::vector<GradedSeries>(nb, zero)));
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
            auto fab = space.dt(space.dt(f, static_cast<int>(a), 0), static_cast<int>(b), 0);
            for (std::size_t mu = 0; mu < nb; ++mu) {
                auto third = set_zero(space.dt(fab, static_cast<int>(mu), 0), tvars);
                if (third.is_zero()) continue;
                for (std::size_t nu = 0; nu < nb; ++nu)
                    if (einv[mu][nu] != 0) c[a][b][nu] += einv[mu][nu] * third;
            }
        }
    return c;
}

std::vector<GradedSeries> wdvv_residuals(const StructureConstants& c, const PotentialSpace& space)
{
    std::size_t nb = c.size();
    std::vector<GradedSeries> out;
    GradedSeries zero(space.table(), c[0][0][0].truncation());
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t g = 0; g < nb; ++g)
                for (std::size_t l = 0; l < nb; ++l) {
                    GradedSeries r = zero;
                    for (std::size_t nu = 0; nu < nb; ++nu) {
                        r += c[a][b][nu] * c[nu][g][l];
                        r -= c[b][g][nu] * c[a][nu][l];
                    }
                    out.push_back(r);
                }
    return out;
}

} // namespace sftrec
