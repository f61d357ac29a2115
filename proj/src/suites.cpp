#include <sftrec/suites.hpp>

#include <sftrec/brackets.hpp>
#include <sftrec/sampling.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <sstream>

namespace sftrec {

std::string_view to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    }
    return "?";
}

bool VerificationReport::passed() const
{
    return count(CheckStatus::Fail) == 0;
}

int VerificationReport::exit_status() const
{
    return passed() ? 0 : 1;
}

std::size_t VerificationReport::count(CheckStatus s) const
{
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [s](const CheckRecord& r) { return r.status == s; }));
}

void VerificationReport::sort()
{
    std::stable_sort(records.begin(), records.end(), [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
}

void VerificationReport::append(VerificationReport other)
{
    for (auto& r : other.records) records.push_back(std::move(r));
}

std::string summarize(const GradedSeries& residual)
{
    if (residual.is_zero()) return "0";
    const auto& [m, c] = *residual.terms().begin();
    auto lead = GradedSeries::monomial(residual.table(), m, c).to_string();
    return std::to_string(residual.size()) + " nonzero terms, first " + lead;
}

namespace {

using Clock = std::chrono::steady_clock;

class Recorder
{
public:
    explicit Recorder(std::string suite) { report_.suite = std::move(suite); }

    // Runs body, which returns (passed, residual summary).
    void check(std::string id, std::string reference, const std::function<std::pair<bool, std::string>()>& body)
    {
        auto start = Clock::now();
        auto [ok, residual] = body();
        add(std::move(id), std::move(reference), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(residual), start);
    }

    void skip(std::string id, std::string reference, std::string reason)
    {
        add(std::move(id), std::move(reference), CheckStatus::Skipped, std::move(reason), Clock::now());
    }

    VerificationReport take()
    {
        report_.sort();
        return std::move(report_);
    }

private:
    void add(std::string id, std::string reference, CheckStatus s, std::string residual, Clock::time_point start)
    {
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        report_.records.push_back({std::move(id), std::move(reference), s, std::move(residual), secs});
    }

    VerificationReport report_;
};

int parity_of(const GradedSeries& f)
{
    return f.parity().value_or(0);
}

Rational koszul(int a, int b)
{
    return ((a & b) & 1) ? Rational(-1) : Rational(1);
}

// Counts failures over samples; keeps the first failing residual.
struct Tally {
    std::string noun = "samples";
    int samples = 0;
    int failures = 0;
    std::string first;

    void add(const GradedSeries& residual)
    {
        ++samples;
        if (residual.is_zero()) return;
        if (failures++ == 0) first = summarize(residual);
    }

    std::pair<bool, std::string> result() const
    {
        if (failures == 0) return {true, "0 on " + std::to_string(samples) + " " + noun};
        return {false, std::to_string(failures) + "/" + std::to_string(samples) + " nonzero; " + first};
    }
};

std::string two_digit(int x)
{
    std::ostringstream os;
    os << std::setw(2) << std::setfill('0') << x;
    return os.str();
}

} // namespace

VerificationReport verify_algebra(const SuiteOptions& o)
{
    if (o.samples < 1) throw InvalidInput("samples must be positive");
    Recorder rec("algebra");
    auto t = mixed_table();
    std::vector<VarId> vars{0, 1, 2, 3, 4};

    rec.check("algebra.bracket.antisymmetry", "{f,g} = -(-1)^{|f||g|} {g,f}", [&] {
        RandomSeries gen(t, o.seed);
        Tally tally;
        for (int it = 0; it < o.samples; ++it) {
            auto f = gen.homogeneous(vars, it & 1, 3), g = gen.homogeneous(vars, (it >> 1) & 1, 3);
            tally.add(poisson_bracket(f, g) + koszul(parity_of(f), parity_of(g)) * poisson_bracket(g, f));
        }
        return tally.result();
    });
    rec.check("algebra.bracket.jacobi", "graded Jacobi identity of the bracket", [&] {
        RandomSeries gen(t, o.seed + 1);
        Tally tally;
        for (int it = 0; it < o.samples; ++it) {
            auto f = gen.homogeneous(vars, it & 1, 3);
            auto g = gen.homogeneous(vars, (it >> 1) & 1, 3);
            auto h = gen.homogeneous(vars, (it >> 2) & 1, 3);
            int a = parity_of(f), b = parity_of(g), c = parity_of(h);
            tally.add(koszul(a, c) * poisson_bracket(f, poisson_bracket(g, h))
                      + koszul(b, a) * poisson_bracket(g, poisson_bracket(h, f))
                      + koszul(c, b) * poisson_bracket(h, poisson_bracket(f, g)));
        }
        return tally.result();
    });
    rec.check("algebra.bracket.leibniz", "{f,gh} = {f,g}h + (-1)^{|f||g|} g{f,h}", [&] {
        RandomSeries gen(t, o.seed + 2);
        Tally tally;
        for (int it = 0; it < o.samples; ++it) {
            auto f = gen.homogeneous(vars, it & 1, 3);
            auto g = gen.homogeneous(vars, (it >> 1) & 1, 3);
            auto h = gen.make(vars, 3);
            tally.add(poisson_bracket(f, g * h) - poisson_bracket(f, g) * h
                      - koszul(parity_of(f), parity_of(g)) * (g * poisson_bracket(f, h)));
        }
        return tally.result();
    });
    rec.check("algebra.derivative.leibniz", "d(fg)/dv = (df/dv) g + (-1)^{|v||f|} f dg/dv", [&] {
        RandomSeries gen(t, o.seed + 3);
        std::vector<VarId> all{0, 1, 2, 3, 4, 5, 6};
        std::uniform_int_distribution<int> pick(0, 6);
        Tally tally;
        for (int it = 0; it < o.samples; ++it) {
            auto v = static_cast<VarId>(pick(gen.rng()));
            auto f = gen.homogeneous(all, it & 1), g = gen.make(all);
            int sv = t->odd(v) ? 1 : 0;
            tally.add(graded_derivative(f * g, v) - graded_derivative(f, v) * g
                      - koszul(sv, parity_of(f)) * (f * graded_derivative(g, v)));
        }
        return tally.result();
    });
    rec.check("algebra.product.supercommutative", "fg = (-1)^{|f||g|} gf", [&] {
        RandomSeries gen(t, o.seed + 4);
        std::vector<VarId> all{0, 1, 2, 3, 4, 5, 6};
        Tally tally;
        for (int it = 0; it < o.samples; ++it) {
            auto f = gen.homogeneous(all, it & 1), g = gen.homogeneous(all, (it >> 1) & 1);
            tally.add(f * g - koszul(parity_of(f), parity_of(g)) * (g * f));
        }
        return tally.result();
    });
    for (int kappa : {1, 2, 3}) {
        rec.check("algebra.weyl.kappa" + std::to_string(kappa), "[p,q] = kappa hbar for every orbit pair", [&] {
            auto tk = mixed_table(kappa, kappa);
            auto hbar = GradedSeries::variable(tk, tk->at("hbar"));
            GradedSeries res(tk);
            for (auto [p, q] : {std::pair{"p1", "q1"}, {"p2", "q2"}})
                res += weyl_commutator(GradedSeries::variable(tk, tk->at(p)), GradedSeries::variable(tk, tk->at(q)))
                       - Rational(kappa) * hbar;
            return std::pair{res.is_zero(), summarize(res)};
        });
    }
    rec.check("algebra.weyl.hbar_divisibility", "[f,g] is divisible by hbar", [&] {
        RandomSeries gen(t, o.seed + 5);
        std::vector<VarId> all{0, 1, 2, 3, 4, 5, 6};
        VarId h = t->at("hbar");
        Tally tally;
        for (int it = 0; it < o.samples; ++it) {
            auto c = weyl_commutator(gen.make(all, 3), gen.make(all, 3));
            GradedSeries free(t);
            for (const auto& [m, coef] : c.terms())
                if (m.exponent(h) == 0) free.add_term(m, coef);
            tally.add(free);
        }
        return tally.result();
    });
    rec.check("algebra.weyl.poisson_limit", "hbar-linear part of [f,g] equals {f,g} on even hbar-free inputs", [&] {
        RandomSeries gen(t, o.seed + 6);
        std::vector<VarId> free_vars{0, 1, 2, 3, 4, 5};
        VarId h = t->at("hbar");
        Tally tally;
        for (int it = 0; it < o.samples; ++it) {
            auto f = gen.homogeneous(free_vars, 0, 3), g = gen.homogeneous(free_vars, 0, 3);
            GradedSeries linear(t);
            auto comm = weyl_commutator(f, g);
            for (const auto& [m, coef] : comm.terms())
                if (m.exponent(h) == 1) {
                    Monomial r;
                    for (auto fac : m.factors)
                        if (fac.first != h) r.factors.push_back(fac);
                    linear.add_term(r, coef);
                }
            tally.add(linear - poisson_bracket(f, g));
        }
        return tally.result();
    });
    rec.check("algebra.star.associativity", "(f*g)*h = f*(g*h)", [&] {
        RandomSeries gen(t, o.seed + 7);
        std::vector<VarId> all{0, 1, 2, 3, 4, 6};
        Tally tally;
        for (int it = 0; it < std::max(1, o.samples / 10); ++it) {
            auto f = gen.make(all, 3), g = gen.make(all, 3), h = gen.make(all, 3);
            tally.add(star_product(star_product(f, g), h) - star_product(f, star_product(g, h)));
        }
        return tally.result();
    });
    return rec.take();
}

VerificationReport verify_hierarchy(const SuiteOptions& o)
{
    if (o.K < 1) throw InvalidInput("K must be positive");
    if (o.levels < 0) throw InvalidInput("levels must be nonnegative");
    Recorder rec("hierarchy");
    auto start = Clock::now();
    auto chk = check_circle_commuting(o.levels, o.K, o.jobs);
    double build = std::chrono::duration<double>(Clock::now() - start).count();
    std::string k = "K" + std::to_string(o.K);
    for (int i = 0; i <= o.levels; ++i)
        for (int j = i; j <= o.levels; ++j) {
            const auto& r = chk.exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            rec.check("hierarchy.circle." + k + ".g" + std::to_string(i) + ".g" + std::to_string(j),
                      "{g_i, g_j} = 0 for the circle Hamiltonians up to cover K",
                      [&] { return std::pair{r.is_zero(), summarize(r)}; });
        }
    (void)build;

    if (o.profile) {
        auto prof = io::load_profiles(*o.profile);
        int K = prof.max_cover;
        OrbitLattice lattice((o.levels + 1) * K, prof.grading);
        std::vector<GradedSeries> hams;
        for (int j = 0; j <= o.levels; ++j)
            hams.push_back(build_geodesic_hamiltonian(j, lattice, prof.signs, {K, TupleRange::ContractionComplete, o.jobs}));
        TruncationPolicy cut;
        cut.max_cover = K;
        auto res = verify_pairwise_commuting(hams);
        for (int i = 0; i <= o.levels; ++i)
            for (int j = i; j <= o.levels; ++j) {
                auto r = truncate(res[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], cut);
                rec.check("hierarchy.profile.K" + std::to_string(K) + ".g" + std::to_string(i) + ".g" + std::to_string(j),
                          "{g_i, g_j} = 0 for the profile's Hamiltonians up to cover K",
                          [&] { return std::pair{r.is_zero(), summarize(r)}; });
            }
    }
    return rec.take();
}

namespace {

// <τ_{a1}…τ_{an}> of the point by the string equation alone.
Rational point_by_string(std::vector<int> a)
{
    std::sort(a.begin(), a.end());
    int n = static_cast<int>(a.size()), sum = 0;
    for (int x : a) sum += x;
    if (n < 3 || sum != n - 3) return 0;
    if (n == 3) return 1;
    std::vector<int> rest(a.begin() + 1, a.end());
    Rational total = 0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] == 0) continue;
        auto b = rest;
        --b[i];
        total += point_by_string(b);
    }
    return total;
}

struct GwTarget {
    std::string key;
    TargetModel model;
    ReconstructionBounds bounds;
};

void check_potential(Recorder& rec, const GwTarget& tg, const CorrelatorTable& table, int trr_levels)
{
    const auto& model = tg.model;
    const auto& b = tg.bounds;
    PotentialSpace space(model, b.max_level);
    auto f = assemble_potential(table, space);
    int nc = static_cast<int>(model.basis.size());
    std::string p = "gw." + tg.key + ".";
    std::string window = " (t-order <= " + std::to_string(b.max_points - 3) + ")";

    for (int a = 0; a < nc; ++a)
        for (int i = 1; i <= b.max_level; ++i) {
            std::string ins = model.basis[static_cast<std::size_t>(a)].id + "." + std::to_string(i);
            rec.check(p + "trr." + ins, "topological recursion for tau_i of " + model.basis[static_cast<std::size_t>(a)].id + window, [&] {
                Tally tally{"triples"};
                for (int c1 = 0; c1 < nc; ++c1)
                    for (int c2 = c1; c2 < nc; ++c2)
                        for (int j = 0; j <= trr_levels; ++j)
                            for (int k = 0; k <= trr_levels; ++k) {
                                if (c1 == c2 && k < j) continue;
                                tally.add(verify_trr(f, space, b, {a, i}, {c1, j}, {c2, k}));
                            }
                return tally.result();
            });
            rec.check(p + "averaged_trr." + ins, "averaged recursion N(N-1) form for tau_i", [&] {
                auto r = verify_averaged_trr(f, space, b, {a, i});
                return std::pair{r.is_zero(), summarize(r)};
            });
        }
    auto sdd = verify_string_dilaton_divisor(f, space, b);
    rec.check(p + "string", "string equation", [&] { return std::pair{sdd.string.is_zero(), summarize(sdd.string)}; });
    rec.check(p + "dilaton", "dilaton equation", [&] { return std::pair{sdd.dilaton.is_zero(), summarize(sdd.dilaton)}; });
    if (sdd.divisor)
        rec.check(p + "divisor", "divisor equation", [&] { return std::pair{sdd.divisor->is_zero(), summarize(*sdd.divisor)}; });
    else
        rec.skip(p + "divisor", "divisor equation", "not applicable: no divisor class");
    rec.check(p + "wdvv", "associativity of the quantum product", [&] {
        Tally tally{"triples"};
        for (const auto& r : wdvv_residuals(quantum_product(f, space), space)) tally.add(r);
        return tally.result();
    });

    rec.check(p + "fault_detection", "a corrupted correlator produces a nonzero recursion residual", [&] {
        std::optional<CorrelatorKey> target;
        for (const auto& [key, v] : table.entries()) {
            if (static_cast<int>(key.insertions.size()) > b.max_points - 2) continue;
            if (std::any_of(key.insertions.begin(), key.insertions.end(), [](const Insertion& x) { return x.level > 0; })) {
                target = key;
                break;
            }
        }
        if (!target) return std::pair{false, std::string("no descendant correlator inside the window")};
        auto broken = table;
        broken.set(*target, table.value(*target) + 1);
        auto g = assemble_potential(broken, space);
        auto desc = *std::find_if(target->insertions.begin(), target->insertions.end(),
                                  [](const Insertion& x) { return x.level > 0; });
        auto r = verify_averaged_trr(g, space, b, desc);
        return std::pair{!r.is_zero(), "corrupted " + describe(model, *target) + ": " + summarize(r)};
    });
}

} // namespace

VerificationReport verify_gw(const SuiteOptions& o)
{
    if (o.trunc_t < 0) throw InvalidInput("trunc-t must be nonnegative");
    if (o.max_points < 3) throw InvalidInput("max-points must be at least 3");
    if (o.max_degree < 0) throw InvalidInput("max-degree must be nonnegative");
    if (o.target != "point" && o.target != "toy" && o.target != "all")
        throw InvalidInput("unknown target '" + o.target + "' (point, toy, all)");
    Recorder rec("gw");
    int T = std::max(o.max_points, o.trunc_t + 3);

    if (o.model) {
        auto model = io::load_model(*o.model);
        GwTarget tg{"model", model, {T, std::min(2, T - 3), model.chern.empty() ? 0 : o.max_degree}};
        check_potential(rec, tg, reconstruct(tg.model, tg.bounds), 1);
        return rec.take();
    }

    if (o.target != "toy") {
        GwTarget tg{"point", TargetModel::point(), {T, T - 3, 0}};
        auto table = reconstruct(tg.model, tg.bounds);
        rec.check("gw.point.oracle", "descendant point correlators equal the string-equation recursion for n <= " +
                                         std::to_string(o.max_points), [&] {
            int checked = 0, wrong = 0, nonzero = 0;
            std::string first;
            std::vector<int> levels;
            std::function<void(int)> walk = [&](int lo) {
                if (levels.size() >= 3) {
                    std::vector<Insertion> ins;
                    for (int a : levels) ins.push_back({0, a});
                    Rational got = table.value(CorrelatorKey(ins, {}));
                    Rational want = point_by_string(levels);
                    ++checked;
                    nonzero += want != 0;
                    if (got != want && wrong++ == 0) first = describe(tg.model, CorrelatorKey(ins, {}));
                }
                if (static_cast<int>(levels.size()) == o.max_points) return;
                for (int a = lo; a <= tg.bounds.max_level; ++a) {
                    levels.push_back(a);
                    walk(a);
                    levels.pop_back();
                }
            };
            walk(0);
            if (wrong) return std::pair{false, std::to_string(wrong) + " mismatches, first " + first};
            return std::pair{true, "0 mismatches on " + std::to_string(checked) + " keys (" + std::to_string(nonzero) + " nonzero)"};
        });
        check_potential(rec, tg, table, 2);
    }
    if (o.target != "point") {
        GwTarget tg{"toy", TargetModel::p1_toy(), {T, 2, o.max_degree}};
        check_potential(rec, tg, reconstruct(tg.model, tg.bounds), 1);
    }
    return rec.take();
}

namespace {

std::vector<std::size_t> span_of(std::size_t from, std::size_t to)
{
    std::vector<std::size_t> out;
    for (auto k = from; k < to; ++k) out.push_back(k);
    return out;
}

std::string summarize(const LinearChainMap& m)
{
    auto nz = m.nonzero_entries();
    if (nz.empty()) return "0";
    return std::to_string(nz.size()) + " nonzero entries";
}

std::string label_key(SectionChoice s)
{
    switch (s) {
    case SectionChoice::TwoZero: return "s20";
    case SectionChoice::OneOne: return "s11";
    case SectionChoice::ZeroTwo: return "s02";
    case SectionChoice::Generic: return "generic";
    }
    return "?";
}

std::pair<bool, std::string> trr_result(const std::vector<TrrCheck>& checks)
{
    std::size_t bad = 0;
    std::string first;
    for (const auto& c : checks)
        if (!c.passed && bad++ == 0) first = c.detail;
    if (bad) return {false, std::to_string(bad) + "/" + std::to_string(checks.size()) + " failed; " + first};
    return {true, "0 on " + std::to_string(checks.size()) + " identities"};
}

bool same_map(const LinearChainMap& a, const LinearChainMap& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (!(a.at(r, c) == b.at(r, c))) return false;
    return true;
}

std::string betti_string(const Homology& h)
{
    std::string s;
    for (auto [d, b] : h.betti()) s += (s.empty() ? "" : " ") + std::to_string(d) + ":" + std::to_string(b);
    if (h.modulus()) s += " (mod " + std::to_string(h.modulus()) + ")";
    return s.empty() ? "0" : s;
}

void check_d_squared(Recorder& rec, const std::string& id, const ChainComplex& cx)
{
    rec.check(id, "d o d = 0", [&] {
        auto r = verify_d_squared(cx);
        if (r.zero()) return std::pair{true, std::string("0")};
        return std::pair{false, std::to_string(r.offending.size()) + " nonzero entries, first " + r.offending[0].first +
                                    " -> " + r.offending[0].second};
    });
}

void check_action(Recorder& rec, const std::string& id, const ChainComplex& cx)
{
    rec.check(id, "quantum action: unit acts as identity and composition matches the quantum product on homology", [&] {
        try {
            Homology h(cx);
            auto rep = quantum_action(cx, h);
            std::size_t bad = 0;
            for (const auto& c : rep.checks) bad += !c.exact;
            return std::pair{rep.passed(), std::to_string(rep.checks.size() - bad) + "/" + std::to_string(rep.checks.size()) +
                                               " exact"};
        } catch (const ActionDoesNotDescend& e) {
            return std::pair{false, std::string(e.what())};
        }
    });
}

void check_contact(Recorder& rec, const std::string& id, const ChainComplex& cx)
{
    auto rep = verify_contact_vanishing(cx);
    std::string ref = "decorated differentials of a contact boundary vanish";
    if (rep.skipped) {
        rec.skip(id, ref, rep.reason);
        return;
    }
    rec.check(id, ref, [&] {
        std::size_t bad = 0;
        for (const auto& e : rep.entries) bad += !(e.induced_zero && e.coefficient_zero);
        return std::pair{rep.passed(), std::to_string(bad) + " nonvanishing of " + std::to_string(rep.entries.size())};
    });
}

void floer_checks(Recorder& rec, const std::string& key, const TargetModel& fiber, int periods,
                  const ReconstructionBounds& bounds, bool action)
{
    for (auto label : {SectionChoice::TwoZero, SectionChoice::OneOne, SectionChoice::ZeroTwo}) {
        auto fm = build_floer_model(fiber, periods, bounds, label);
        ChainComplex fl(fm.floer), cy(fm.cylinder);
        std::string p = "cylhom." + key + "." + label_key(label) + ".";
        check_d_squared(rec, p + "floer.d_squared", fl);
        check_d_squared(rec, p + "cylinder.d_squared", cy);
        rec.check(p + "floer.offdiagonal", "hat -> check block of d is zero", [&] {
            auto blocks = split_blocks(fl);
            return std::pair{blocks.split.is_zero(), summarize(blocks.split)};
        });
        rec.check(p + "cylinder.offdiagonal", "hat -> check block of d is zero at tcheck = 0 and wedge t = 0", [&] {
            std::vector<VarId> checks;
            auto table = cy.space().table();
            for (VarId v = 0; v < table->size(); ++v)
                if (table->kind(v) == VarKind::TCheck) checks.push_back(v);
            auto blocks = split_blocks(cy);
            auto r = set_zero(blocks.split, cy.wedge_variables())
                         .map_entries([&](const GradedSeries& s) { return set_zero(s, checks); }, 0);
            return std::pair{r.is_zero(), summarize(r)};
        });
        rec.check(p + "floer.trr", "non-equivariant recursion " + std::string(to_string(label)),
                  [&] { return trr_result(verify_noneq_trr(fl)); });
        rec.check(p + "equivariant_matches_floer", "equivariant recursion residuals equal the Floer residuals block by block", [&] {
            std::size_t n = fl.generators().size() / 2;
            int nc = static_cast<int>(fiber.basis.size());
            int compared = 0, bad = 0;
            for (int a = 0; a < nc; ++a)
                for (int i = 1; i <= bounds.max_level; ++i) {
                    auto r = noneq_trr_residual(fl, label, {a, i});
                    auto e = rebase(equiv_trr_residual(cy, label, {nc + a, i}), fl.space().table());
                    bad += !same_map(r.block(span_of(0, n), span_of(0, n)), e);
                    bad += !same_map(r.block(span_of(n, 2 * n), span_of(n, 2 * n)), e);
                    compared += 2;
                }
            return std::pair{bad == 0, std::to_string(bad) + " differing of " + std::to_string(compared) + " blocks"};
        });
        if (action) check_action(rec, p + "quantum_action", fl);
        if (label == SectionChoice::TwoZero) {
            rec.check("cylhom." + key + ".homology", "homology of the Floer complex", [&] {
                Homology h(fl);
                return std::pair{true, betti_string(h)};
            });
        }
    }
}

} // namespace

VerificationReport verify_cylhom(const SuiteOptions& o)
{
    Recorder rec("cylhom");
    if (o.counts) {
        auto data = io::load_counts(*o.counts);
        ChainComplex cx(data);
        std::string p = "cylhom.input.";
        check_d_squared(rec, p + "d_squared", cx);
        bool dsq = verify_d_squared(cx).zero();
        if (!dsq) {
            rec.skip(p + "homology", "homology", "d o d != 0");
            return rec.take();
        }
        rec.check(p + "homology", "homology", [&] { return std::pair{true, betti_string(Homology(cx))}; });
        if (!data.orbits.equivariant && !data.fiber) {
            rec.check(p + "trr", "non-equivariant recursion " + std::string(to_string(data.counts.label)),
                      [&] { return trr_result(verify_noneq_trr(cx)); });
        }
        if (!data.orbits.equivariant && data.fiber) {
            if (data.counts.label == SectionChoice::Generic) {
                rec.skip(p + "equivariant_trr", "equivariant recursion for every fiber class", "generic sections carry no chain-level identity");
            } else {
                int nc = static_cast<int>(data.fiber->basis.size());
                rec.check(p + "equivariant_trr", "equivariant recursion for every fiber class", [&] {
                    int bad = 0, total = 0;
                    for (int a = 0; a < nc; ++a)
                        for (int i = 1; i <= data.bounds.max_level; ++i) {
                            ++total;
                            bad += !equiv_trr_residual(cx, data.counts.label, {nc + a, i}).is_zero();
                        }
                    return std::pair{bad == 0, std::to_string(bad) + " nonzero of " + std::to_string(total)};
                });
            }
        }
        check_contact(rec, p + "contact", cx);
        bool has_action = std::any_of(data.counts.entries.begin(), data.counts.entries.end(), [](const CountEntry& e) {
            return std::any_of(e.insertions.begin(), e.insertions.end(),
                               [](const CountInsertion& i) { return i.constrained && i.level == 0; });
        });
        std::string action_ref = "quantum action: unit acts as identity and composition matches the quantum product on homology";
        if (data.orbits.equivariant)
            rec.skip(p + "quantum_action", action_ref, "equivariant data");
        else if (!has_action)
            rec.skip(p + "quantum_action", action_ref, "no constrained level-0 counts");
        else
            check_action(rec, p + "quantum_action", cx);
        return rec.take();
    }

    floer_checks(rec, "point", TargetModel::point(), 2, {6, 2, 0}, true);
    floer_checks(rec, "toy", TargetModel::p1_toy(), 1, {5, 2, std::min(1, o.max_degree)}, true);

    ChainComplex contact(contact_fixture());
    check_contact(rec, "cylhom.contact.vanishing", contact);
    ChainComplex generic(generic_fixture());
    rec.check("cylhom.generic.trr_on_homology", "(2,0) recursion holds on homology for generic sections",
              [&] { return trr_result(verify_noneq_trr(generic)); });
    rec.check("cylhom.fault_detection", "an extra count into a non-closed generator is caught by d o d = 0", [&] {
        auto d = build_floer_model(TargetModel::point(), 2, {6, 2, 0}, SectionChoice::TwoZero).floer;
        const auto& e = d.counts.entries.front();
        std::string orbit = e.from.substr(0, e.from.rfind('.'));
        auto it = std::find_if(d.orbits.orbits.begin(), d.orbits.orbits.end(), [&](const OrbitSpec& s) { return s.id == orbit; });
        d.orbits.orbits.push_back({"extra", it->degree + 1, 1, true});
        d.counts.entries.push_back({"extra" + e.from.substr(orbit.size()), e.from, {}, {}, Rational(1)});
        auto r = verify_d_squared(ChainComplex(d));
        if (r.zero()) return std::pair{false, std::string("not detected")};
        return std::pair{true, std::to_string(r.offending.size()) + " offending pairs, first " + r.offending[0].first + " -> " +
                                   r.offending[0].second};
    });
    return rec.take();
}

PerturbationLedger m05_ledger()
{
    auto P = make_pair_divisor;
    Rational sixth = make_rational(1, 6);
    PerturbationLedger l;
    l.psi_point = 1;
    l.entries = {
        {P(1, 5), make_rational(1, 2), P(1, 5), {{P(3, 4), -sixth}, {P(2, 4), -sixth}, {P(2, 3), -sixth}}},
        {P(3, 4), sixth, P(3, 4), {{P(1, 5), -sixth}, {P(2, 5), sixth}, {P(1, 2), -sixth}}},
        {P(1, 5), make_rational(1, 2), P(3, 4), {{P(1, 5), make_rational(2, 6)}, {P(1, 5), sixth}}},
    };
    l.restrictions = {
        {P(3, 4),
         {{P(1, 5), P(1, 5), make_rational(2, 6)},
          {P(1, 2), P(1, 2), make_rational(2, 6)},
          {P(2, 5), P(3, 4), sixth},
          {P(2, 5), P(2, 5), sixth}}},
        {P(1, 5), {}},
    };
    return l;
}

namespace {

std::string pair_name(DivisorPair p)
{
    return "D" + std::to_string(p.first) + std::to_string(p.second);
}

std::string weights_string(const std::vector<Rational>& w)
{
    std::string s = "(";
    for (std::size_t k = 0; k < w.size(); ++k) s += (k ? ", " : "") + to_string(w[k]);
    return s + ")";
}

} // namespace

VerificationReport verify_divisor(const SuiteOptions& o)
{
    if (o.n < 4) throw InvalidInput("n must be at least 4");
    Recorder rec("divisor");

    for (int n = 4; n <= o.n; ++n)
        rec.check("divisor.averaged_psi.n" + two_digit(n), "averaged psi_1 coefficient (n-3)!/(n-1)! k!/(k-2)! on D(I|J), |J| = k", [&] {
            auto e = averaged_psi(n, 1);
            Rational base = factorial(static_cast<unsigned>(n - 3)) / factorial(static_cast<unsigned>(n - 1));
            int bad = 0;
            std::map<int, Rational> seen;
            for (const auto& [s, c] : e.terms) {
                int k = s.r2();
                bad += c != base * k * (k - 1);
                seen[k] = c;
            }
            std::string summary;
            for (const auto& [k, c] : seen) summary += (summary.empty() ? "" : ", ") + std::string("|J|=") + std::to_string(k) + ": " + to_string(c);
            if (n == 4) bad += !(seen.size() == 1 && seen.begin()->second == make_rational(1, 3));
            if (n == 5) bad += !(seen.size() == 2 && seen[2] == make_rational(1, 6) && seen[3] == make_rational(1, 2));
            return std::pair{bad == 0 && !e.terms.empty(), std::to_string(e.terms.size()) + " terms; " + summary};
        });

    if (o.n != 5) {
        rec.skip("divisor.m05.pairing", "boundary divisor pairing on M05", "only defined for n = 5");
        rec.skip("divisor.ledger", "perturbation ledger", "only defined for n = 5");
        return rec.take();
    }

    rec.check("divisor.m05.pairing", "D.D = -1, disjoint pairs +1, overlapping pairs 0", [&] {
        int bad = 0, checked = 0;
        for (int a = 1; a <= 5; ++a)
            for (int b = a + 1; b <= 5; ++b)
                for (int c = 1; c <= 5; ++c)
                    for (int d = c + 1; d <= 5; ++d) {
                        int got = m05_pairing(make_pair_divisor(a, b), make_pair_divisor(c, d));
                        int overlap = (a == c) + (a == d) + (b == c) + (b == d);
                        int want = overlap == 2 ? -1 : overlap == 0 ? 1 : 0;
                        bad += got != want;
                        ++checked;
                    }
        return std::pair{bad == 0, std::to_string(bad) + " wrong of " + std::to_string(checked)};
    });
    rec.check("divisor.m05.psi_squared", "averaged psi_1 squared on M05 equals 1", [&] {
        auto psi = averaged_psi(5, 1);
        Rational v = intersection_pairing_M05(psi, psi);
        return std::pair{v == 1, to_string(v)};
    });

    auto ledger = o.ledger ? io::load_ledger(*o.ledger) : m05_ledger();
    rec.check("divisor.ledger.entries", "perturbed intersection indices sum to weight times pairing", [&] {
        auto rep = perturbation_ledger_check(ledger);
        std::string sums;
        for (const auto& e : ledger.entries) {
            Rational s = 0;
            for (const auto& pt : e.points) s += pt.index;
            sums += (sums.empty() ? "" : ", ") + pair_name(e.perturbed) + "." + pair_name(e.target) + " = " + to_string(s);
        }
        if (!rep.ok()) return std::pair{false, rep.violations.front()};
        return std::pair{true, std::to_string(rep.sums_checked) + " sums; " + sums};
    });
    rec.check("divisor.ledger.symmetrized", "ledger images under permutations fixing the psi point", [&] {
        auto rep = perturbation_ledger_check(symmetrize(ledger));
        if (!rep.ok()) return std::pair{false, rep.violations.front()};
        return std::pair{true, std::to_string(rep.sums_checked) + " sums"};
    });

    for (int r = 2; r <= 4; ++r) {
        int P = r;
        for (int nm = 1; nm < P; ++nm) {
            SplitSpace sp{r, 1, P - nm, nm};
            std::vector<ZeroLocus> ex{averaged_map_zero_locus(sp, MapVariant::A), averaged_map_zero_locus(sp, MapVariant::B),
                                      averaged_map_zero_locus(sp, MapVariant::C)};
            auto targets = simplified_targets(sp);
            for (std::size_t k = 0; k < targets.size(); ++k) {
                std::string id = "divisor.combination.r" + std::to_string(r) + ".P" + std::to_string(P) + ".np" +
                                 std::to_string(P - nm) + ".nm" + std::to_string(nm) + ".target" + std::to_string(k + 1);
                rec.check(id, "target " + targets[k].name + " as a combination of the three averaged sections", [&] {
                    auto res = solve_combination(ex, targets[k]);
                    if (res.feasible) return std::pair{true, "feasible, weights " + weights_string(res.weights)};
                    std::string cert;
                    for (const auto& c : res.certificate) cert += (cert.empty() ? "" : "; ") + c;
                    return std::pair{!res.certificate.empty(), "infeasible, certificate: " + cert};
                });
            }
        }
    }
    rec.check("divisor.combination.literal_weights", "fixed weights (-1,1,0) and (1,-2,1) for the second and third targets", [&] {
        std::string found;
        for (int r = 2; r <= 4; ++r) {
            SplitSpace sp{r, 1, r - 1, 1};
            std::vector<ZeroLocus> ex{averaged_map_zero_locus(sp, MapVariant::A), averaged_map_zero_locus(sp, MapVariant::B),
                                      averaged_map_zero_locus(sp, MapVariant::C)};
            auto targets = simplified_targets(sp);
            bool second = combination_matches(ex, {-1, 1, 0}, targets[1]);
            bool third = combination_matches(ex, {1, -2, 1}, targets[2]);
            found += (found.empty() ? "" : "; ") + std::string("r") + std::to_string(r) + " second " + (second ? "holds" : "fails") +
                     ", third " + (third ? "holds" : "fails");
        }
        return std::pair{true, "literal weights: " + found};
    });
    return rec.take();
}

VerificationReport run_suite(std::string_view name, const SuiteOptions& options)
{
    if (name == "algebra") return verify_algebra(options);
    if (name == "hierarchy") return verify_hierarchy(options);
    if (name == "gw") return verify_gw(options);
    if (name == "cylhom") return verify_cylhom(options);
    if (name == "divisor") return verify_divisor(options);
    if (name == "all") {
        VerificationReport all;
        all.suite = "all";
        for (const auto& s : suite_names()) all.append(run_suite(s, options));
        all.sort();
        return all;
    }
    throw InvalidInput("unknown suite '" + std::string(name) + "'");
}

std::string render_text(const VerificationReport& report, bool timings)
{
    std::ostringstream os;
    std::size_t width = 0;
    for (const auto& r : report.records) width = std::max(width, r.id.size());
    for (const auto& r : report.records) {
        os << std::left << std::setw(7) << to_string(r.status) << " " << std::setw(static_cast<int>(width)) << r.id << "  "
           << r.residual;
        if (timings) os << "  [" << std::fixed << std::setprecision(3) << r.seconds << "s]";
        os << "\n";
    }
    os << report.suite << ": " << report.count(CheckStatus::Pass) << " pass, " << report.count(CheckStatus::Fail) << " fail, "
       << report.count(CheckStatus::Skipped) << " skipped\n";
    return os.str();
}

io::Json to_json(const VerificationReport& report, bool timings)
{
    io::Json j;
    j["schema"] = io::kReportSchema;
    j["suite"] = report.suite;
    j["status"] = report.passed() ? "pass" : "fail";
    j["exit_status"] = report.exit_status();
    j["counts"] = {{"pass", report.count(CheckStatus::Pass)},
                   {"fail", report.count(CheckStatus::Fail)},
                   {"skipped", report.count(CheckStatus::Skipped)}};
    j["checks"] = io::Json::array();
    for (const auto& r : report.records) {
        io::Json c{{"id", r.id}, {"reference", r.reference}, {"status", std::string(to_string(r.status))}, {"residual", r.residual}};
        if (timings) c["seconds"] = r.seconds;
        j["checks"].push_back(c);
    }
    return j;
}

} // namespace sftrec
