#include <sftrec/hierarchy.hpp>
#include <sftrec/brackets.hpp>
#include <sftrec/errors.hpp>

#include <algorithm>
#include <future>
#include <string>

namespace sftrec {

int GradingProfile::q(int n) const
{
    auto it = q_degree.find(n);
    return it == q_degree.end() ? default_q_degree : it->second;
}

int SignProfile::sign(const std::vector<int>& tuple) const
{
    for (int n : tuple)
        if (bad_covers.count(std::abs(n))) return 0;
    auto it = tuples.find(tuple);
    if (it != tuples.end()) return it->second;
    if (!default_sign) {
        std::string s;
        for (int n : tuple) s += (s.empty() ? "" : ",") + std::to_string(n);
        throw InvalidInput("tuple (" + s + ") outside the sign profile's domain");
    }
    return *default_sign;
}

void SignProfile::validate() const
{
    auto ok = [](int e) { return e >= -1 && e <= 1; };
    if (default_sign && !ok(*default_sign)) throw InvalidInput("sign profile: default sign must be -1, 0 or 1");
    for (const auto& [t, e] : tuples) {
        if (!ok(e)) throw InvalidInput("sign profile: signs must be -1, 0 or 1");
        bool bad = std::any_of(t.begin(), t.end(), [&](int n) { return bad_covers.count(std::abs(n)) > 0; });
        if (!bad && e == 0) throw InvalidInput("sign profile: zero sign on a tuple without bad orbits");
    }
}

OrbitLattice::OrbitLattice(int max_cover, GradingProfile grading) : max_cover_(max_cover), grading_(std::move(grading))
{
    if (max_cover < 1) throw InvalidInput("max cover must be at least 1");
    std::vector<VariableSpec> specs;
    for (int n = 1; n <= max_cover; ++n) {
        specs.push_back({"q" + std::to_string(n), VarKind::QOrbit, {0, n}, grading_.q(n), n});
        specs.push_back({"p" + std::to_string(n), VarKind::POrbit, {0, n}, grading_.p(n), n});
    }
    table_ = VariableTable::declare(std::move(specs), grading_.half_dim);
}

VarId OrbitLattice::u(int n) const
{
    if (n == 0 || std::abs(n) > max_cover_) throw InvalidInput("index " + std::to_string(n) + " outside the lattice");
    return static_cast<VarId>(2 * (std::abs(n) - 1) + (n > 0 ? 0 : 1));
}

int OrbitLattice::winding(const Monomial& m) const
{
    int w = 0;
    for (auto [v, e] : m.factors) w += (table_->kind(v) == VarKind::QOrbit ? 1 : -1) * table_->cover(v) * e;
    return w;
}

namespace {

using TermMap = std::map<Monomial, Rational>;

struct TupleSink {
    const OrbitLattice& lattice;
    const SignProfile* signs;
    std::optional<int> degree_filter;

    void add(const std::vector<int>& tuple, TermMap& out) const
    {
        int eps = signs ? signs->sign(tuple) : 1;
        if (eps == 0) return;
        const auto& table = *lattice.table();
        int sign = 1;
        Monomial m;
        for (int n : tuple) {
            auto r = multiply_monomials(table, m, Monomial{{{lattice.u(n), 1}}});
            if (!r) return;
            sign *= r->first;
            m = std::move(r->second);
        }
        if (degree_filter && monomial_degree(table, m) != *degree_filter) return;
        out[m] += sign * eps;
    }
};

// Tuples with leading index `first`; positions other than `big` range over ±1..±K and n_big is solved.
void enumerate_leading(int first, int r, int K, TupleRange range, const TupleSink& sink, TermMap& out)
{
    int max_index = sink.lattice.max_cover();
    std::vector<int> tuple(static_cast<std::size_t>(r));
    int positions = range == TupleRange::Truncated ? 1 : r;
    for (int b = 0; b < positions; ++b) {
        int big = r - 1 - b;
        // leading index fixed unless it is the solved one
        std::vector<int> free;
        for (int k = 0; k < r; ++k)
            if (k != big) free.push_back(k);
        auto recurse = [&](auto&& self, std::size_t pos, int sum) -> void {
            if (pos == free.size()) {
                int n = -sum;
                if (n == 0 || std::abs(n) > max_index) return;
                bool inside = std::abs(n) <= K;
                if (big != r - 1 && inside) return;  // counted with the solved index last
                if (big == 0 && n != first) return;
                if (range == TupleRange::Truncated && !inside) return;
                tuple[static_cast<std::size_t>(big)] = n;
                sink.add(tuple, out);
                return;
            }
            int k = free[pos];
            if (k == 0) {
                tuple[0] = first;
                self(self, pos + 1, sum + first);
                return;
            }
            for (int n = -K; n <= K; ++n) {
                if (n == 0) continue;
                tuple[static_cast<std::size_t>(k)] = n;
                self(self, pos + 1, sum + n);
            }
        };
        if (big == 0 || std::abs(first) <= K) recurse(recurse, 0, 0);
    }
}

GradedSeries build(int j, const OrbitLattice& lattice, const SignProfile* signs, std::optional<int> filter,
                   const HamiltonianOptions& o)
{
    if (j < 0) throw InvalidInput("level j must be nonnegative");
    if (o.K < 1) throw InvalidInput("cover bound K must be at least 1");
    if (o.K > lattice.max_cover()) throw InvalidInput("cover bound K exceeds the lattice");
    int r = j + 2;
    int reach = o.range == TupleRange::Truncated ? o.K : std::min(lattice.max_cover(), (r - 1) * o.K);
    TupleSink sink{lattice, signs, filter};

    std::vector<int> leads;
    for (int n = -reach; n <= reach; ++n)
        if (n != 0) leads.push_back(n);
    std::vector<TermMap> parts(leads.size());
    auto work = [&](std::size_t lo, std::size_t step) {
        for (std::size_t i = lo; i < leads.size(); i += step) enumerate_leading(leads[i], r, o.K, o.range, sink, parts[i]);
    };
    std::size_t jobs = static_cast<std::size_t>(std::max(1, o.jobs));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::future<void>> fs;
        for (std::size_t w = 0; w < jobs; ++w) fs.push_back(std::async(std::launch::async, work, w, jobs));
        for (auto& f : fs) f.get();
    }

    Rational scale = 1 / Rational(factorial(static_cast<unsigned>(r)));
    GradedSeries out(lattice.table());
    for (const auto& part : parts)
        for (const auto& [m, c] : part) out.add_term(m, c * scale);
    return out;
}

} // namespace

GradedSeries build_circle_hamiltonian(int j, const OrbitLattice& lattice, const HamiltonianOptions& options)
{
    return build(j, lattice, nullptr, std::nullopt, options);
}

GradedSeries build_geodesic_hamiltonian(int j, const OrbitLattice& lattice, const SignProfile& signs,
                                        const HamiltonianOptions& options)
{
    signs.validate();
    int m = lattice.grading().half_dim;
    return build(j, lattice, &signs, 2 * (m + j - 3), options);
}

std::vector<std::vector<GradedSeries>> verify_pairwise_commuting(const std::vector<GradedSeries>& hams)
{
    std::vector<std::vector<GradedSeries>> out;
    for (const auto& a : hams) {
        out.emplace_back();
        for (const auto& b : hams) out.back().push_back(poisson_bracket(a, b));
    }
    return out;
}

bool CommutingCheck::exact_zero() const
{
    for (const auto& row : exact)
        for (const auto& r : row)
            if (!r.is_zero()) return false;
    return true;
}

CommutingCheck check_circle_commuting(int max_level, int K, int jobs)
{
    if (max_level < 0) throw InvalidInput("max level must be nonnegative");
    OrbitLattice lattice((max_level + 1) * K);
    CommutingCheck out;
    out.K = K;
    out.max_level = max_level;
    std::vector<GradedSeries> complete, naive;
    for (int j = 0; j <= max_level; ++j) {
        complete.push_back(build_circle_hamiltonian(j, lattice, {K, TupleRange::ContractionComplete, jobs}));
        naive.push_back(build_circle_hamiltonian(j, lattice, {K, TupleRange::Truncated, jobs}));
    }
    TruncationPolicy cut;
    cut.max_cover = K;
    for (auto& row : verify_pairwise_commuting(complete)) {
        out.exact.emplace_back();
        for (auto& r : row) out.exact.back().push_back(truncate(r, cut));
    }
    out.naive = verify_pairwise_commuting(naive);
    return out;
}

} // namespace sftrec
