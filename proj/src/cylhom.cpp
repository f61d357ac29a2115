#include <sftrec/cylhom.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace sftrec {

namespace {

int parity_of(int d) { return d & 1; }

bool parity_consistent(const VariableTable& table, const GradedSeries& s, int want)
{
    for (const auto& [m, c] : s.terms())
        if (parity_of(monomial_degree(table, m)) != parity_of(want)) return false;
    return true;
}

int series_shift(const GradedSeries& c)
{
    if (c.is_zero()) return 0;
    if (auto d = c.degree()) return *d;
    if (auto p = c.parity()) return *p;
    throw InvalidInput("scalar coefficient has mixed parity");
}

std::string label_mismatch(SectionChoice want, SectionChoice have)
{
    return "identity " + std::string(to_string(want)) + " requested on data labelled " +
           std::string(to_string(have));
}

} // namespace

std::vector<Generator> generators(const OrbitSet& orbits)
{
    std::vector<Generator> out;
    if (orbits.equivariant) {
        for (const auto& o : orbits.orbits)
            if (o.good) out.push_back({o.id, o.id, GeneratorKind::Plain, o.degree});
        return out;
    }
    for (const auto& o : orbits.orbits)
        if (o.good) out.push_back({o.id + ".hat", o.id, GeneratorKind::Hat, o.degree});
    for (const auto& o : orbits.orbits)
        if (o.good) out.push_back({o.id + ".check", o.id, GeneratorKind::Check, o.degree + 1});
    return out;
}

std::string_view to_string(SectionChoice s)
{
    switch (s) {
    case SectionChoice::TwoZero: return "(2,0)";
    case SectionChoice::OneOne: return "(1,1)";
    case SectionChoice::ZeroTwo: return "(0,2)";
    case SectionChoice::Generic: return "generic";
    }
    return "generic";
}

std::optional<SectionChoice> section_choice_from_string(std::string_view s)
{
    for (auto c : {SectionChoice::TwoZero, SectionChoice::OneOne, SectionChoice::ZeroTwo, SectionChoice::Generic})
        if (to_string(c) == s) return c;
    return std::nullopt;
}

void ChainComplexData::validate() const
{
    auto fail = [&](const std::string& field, const std::string& msg) {
        throw InvalidInput("counts '" + name + "': " + field + ": " + msg);
    };
    model.validate();
    if (fiber) {
        fiber->validate();
        if (model.basis.size() != 2 * fiber->basis.size()) fail("fiber", "model is not S1 x fiber");
        for (std::size_t k = 0; k < fiber->basis.size(); ++k)
            if (model.basis[k].id != fiber->basis[k].id) fail("fiber", "fiber classes must come first");
    }
    if (contact && fiber) fail("contact", "contact data cannot carry a fiber");
    if (bounds.max_level < 0 || bounds.max_points < 3) fail("bounds", "out of range");

    std::set<std::string> ids;
    std::set<std::string> bad;
    for (const auto& o : orbits.orbits) {
        if (!ids.insert(o.id).second) fail("orbits", "duplicate orbit id '" + o.id + "'");
        if (o.multiplicity < 1) fail("orbits", "multiplicity of '" + o.id + "' must be positive");
        if (!o.good) bad.insert(o.id);
    }
    std::set<std::string> gens;
    for (const auto& g : generators(orbits)) gens.insert(g.id);

    for (std::size_t k = 0; k < counts.entries.size(); ++k) {
        const auto& e = counts.entries[k];
        std::string field = "entries[" + std::to_string(k) + "]";
        for (const auto* g : {&e.from, &e.to}) {
            if (gens.count(*g)) continue;
            std::string orbit = g->substr(0, g->find('.'));
            if (bad.count(orbit)) fail(field, "bad orbit '" + orbit + "' cannot enter the complex");
            fail(field, "unknown generator '" + *g + "'");
        }
        for (const auto& ins : e.insertions) {
            if (ins.cls < 0 || static_cast<std::size_t>(ins.cls) >= model.basis.size())
                fail(field, "class index out of range");
            if (ins.level < 0 || ins.level > bounds.max_level) fail(field, "level out of range");
            if (ins.constrained && orbits.equivariant)
                fail(field, "constrained insertion in equivariant data");
        }
        if (e.degree.size() != static_cast<std::size_t>(model.h2_rank()))
            fail(field, "curve class length differs from h2 rank");
    }
}

// ---------------------------------------------------------------- LinearChainMap

LinearChainMap::LinearChainMap(TablePtr table, std::vector<int> source_degrees, std::vector<int> target_degrees,
                               int degree)
    : table_(std::move(table)), source_(std::move(source_degrees)), target_(std::move(target_degrees)), degree_(degree),
      entries_(source_.size() * target_.size(), GradedSeries(table_))
{
}

void LinearChainMap::set(std::size_t row, std::size_t col, GradedSeries s)
{
    if (s.table() != table_) throw TableMismatch();
    if (!parity_consistent(*table_, s, degree_ + source_.at(col) - target_.at(row)))
        throw InvalidInput("chain map entry (" + std::to_string(row) + "," + std::to_string(col) +
                           ") breaks parity homogeneity");
    entries_[row * cols() + col] = std::move(s);
}

void LinearChainMap::add(std::size_t row, std::size_t col, const GradedSeries& s)
{
    set(row, col, at(row, col) + s);
}

bool LinearChainMap::is_zero() const
{
    return std::all_of(entries_.begin(), entries_.end(), [](const GradedSeries& s) { return s.is_zero(); });
}

std::vector<std::pair<std::size_t, std::size_t>> LinearChainMap::nonzero_entries() const
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < cols(); ++c)
            if (!at(r, c).is_zero()) out.emplace_back(r, c);
    return out;
}

LinearChainMap LinearChainMap::block(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs,
                                     int target_shift) const
{
    std::vector<int> src, tgt;
    for (auto c : cs) src.push_back(source_.at(c));
    for (auto r : rs) tgt.push_back(target_.at(r) + target_shift);
    LinearChainMap out(table_, src, tgt, degree_ + target_shift);
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = 0; j < cs.size(); ++j) out.entries_[i * cs.size() + j] = at(rs[i], cs[j]);
    return out;
}

void LinearChainMap::check_shape(const LinearChainMap& o) const
{
    if (o.table_ != table_) throw TableMismatch();
    if (o.source_.size() != source_.size() || o.target_.size() != target_.size())
        throw InvalidInput("chain maps of different shapes");
}

LinearChainMap& LinearChainMap::operator+=(const LinearChainMap& o)
{
    check_shape(o);
    if (is_zero()) degree_ = o.degree_;
    else if (!o.is_zero() && parity_of(o.degree_) != parity_of(degree_))
        throw InvalidInput("sum of chain maps of different parity");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
}

LinearChainMap& LinearChainMap::operator-=(const LinearChainMap& o)
{
    LinearChainMap neg = o;
    neg *= Rational(-1);
    return *this += neg;
}

LinearChainMap& LinearChainMap::operator*=(const Rational& c)
{
    for (auto& e : entries_) e *= c;
    return *this;
}

bool LinearChainMap::operator==(const LinearChainMap& o) const
{
    return source_ == o.source_ && target_ == o.target_ && entries_ == o.entries_;
}

LinearChainMap compose(const LinearChainMap& a, const LinearChainMap& b)
{
    if (a.table() != b.table()) throw TableMismatch();
    if (a.cols() != b.rows()) throw InvalidInput("composition of chain maps with incompatible shapes");
    LinearChainMap out(a.table(), b.source_degrees(), a.target_degrees(), a.degree() + b.degree());
    int pa = parity_of(a.degree());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t k = 0; k < b.rows(); ++k) {
            const auto& c = b.at(k, j);
            if (c.is_zero()) continue;
            GradedSeries tw = koszul_twist(c, pa);
            for (std::size_t i = 0; i < a.rows(); ++i) {
                const auto& x = a.at(i, k);
                if (!x.is_zero()) out.add(i, j, tw * x);
            }
        }
    return out;
}

LinearChainMap scale(const GradedSeries& c, const LinearChainMap& a)
{
    int shift = series_shift(c);
    return a.map_entries([&](const GradedSeries& s) { return c * s; }, shift);
}

LinearChainMap set_zero(const LinearChainMap& a, std::span<const VarId> vars)
{
    return a.map_entries([&](const GradedSeries& s) { return set_zero(s, vars); }, 0);
}

LinearChainMap truncate(const LinearChainMap& a, const TruncationPolicy& policy)
{
    return a.map_entries([&](const GradedSeries& s) { return truncate(s, policy); }, 0);
}

LinearChainMap rebase(const LinearChainMap& a, const TablePtr& target)
{
    const auto& src = *a.table();
    LinearChainMap out(target, a.source_degrees(), a.target_degrees(), a.degree());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) {
            GradedSeries moved(target);
            for (const auto& [m, coef] : a.at(r, c).terms()) {
                GradedSeries term = GradedSeries::constant(target, coef);
                for (auto [v, e] : m.factors) {
                    auto w = target->find(src[v].id);
                    if (!w) throw UnknownVariable(src[v].id);
                    term = term * GradedSeries::monomial(target, Monomial{{{*w, e}}}, 1);
                }
                moved += term;
            }
            out.set(r, c, std::move(moved));
        }
    return out;
}

// ---------------------------------------------------------------- ChainComplex

namespace {

GradedSeries potential_for(const ChainComplexData& data, const PotentialSpace& space)
{
    if (data.fiber) {
        GradedSeries fm = assemble_potential(reconstruct(*data.fiber, data.bounds), space);
        GradedSeries fv(space.table(), fm.truncation());
        int n = static_cast<int>(data.fiber->basis.size());
        for (int b = 0; b < n; ++b)
            for (int j = 0; j <= data.bounds.max_level; ++j)
                fv += space.tvar(n + b, j, fm.truncation()) * space.dt(fm, b, j);
        return fv;
    }
    return assemble_potential(reconstruct(data.model, data.bounds), space);
}

PotentialSpace make_space(const ChainComplexData& data)
{
    data.validate();
    return PotentialSpace(data.model, data.bounds.max_level,
                          data.orbits.equivariant ? std::nullopt : std::optional<int>(-1));
}

std::vector<int> degrees_of(const std::vector<Generator>& gens)
{
    std::vector<int> out;
    for (const auto& g : gens) out.push_back(g.degree);
    return out;
}

} // namespace

ChainComplex::ChainComplex(ChainComplexData data)
    : data_(std::move(data)), gens_(sftrec::generators(data_.orbits)), space_(make_space(data_)),
      potential_(potential_for(data_, space_)),
      d_(space_.table(), degrees_of(gens_), degrees_of(gens_), -1)
{
    const auto& table = space_.table();
    for (const auto& e : data_.counts.entries) {
        std::map<CountInsertion, int> mult;
        GradedSeries term = GradedSeries::constant(table, 1);
        for (const auto& ins : e.insertions) {
            ++mult[ins];
            VarId v = ins.constrained ? *space_.tcheck(ins.cls, ins.level) : space_.t(ins.cls, ins.level);
            term = term * GradedSeries::variable(table, v);
        }
        Rational aut = 1;
        for (auto [ins, k] : mult) aut *= factorial(static_cast<unsigned>(k));
        Monomial zm;
        for (std::size_t k = 0; k < e.degree.size(); ++k)
            if (e.degree[k]) zm.factors.emplace_back(space_.z(static_cast<int>(k)), e.degree[k]);
        term = term * GradedSeries::monomial(table, zm, e.value / aut);
        d_.add(index(e.to), index(e.from), term);
    }
}

std::size_t ChainComplex::index(const std::string& generator) const
{
    for (std::size_t k = 0; k < gens_.size(); ++k)
        if (gens_[k].id == generator) return k;
    throw InvalidInput("unknown generator '" + generator + "'");
}

LinearChainMap ChainComplex::decorated(int cls, int level) const
{
    int deg = space_.table()->degree(space_.t(cls, level));
    return d_.map_entries([&](const GradedSeries& s) { return space_.dt(s, cls, level); }, -deg);
}

LinearChainMap ChainComplex::decorated_check(int cls, int level) const
{
    auto v = space_.tcheck(cls, level);
    if (!v) throw InvalidInput("constrained maps need non-equivariant data");
    int deg = space_.table()->degree(*v);
    return d_.map_entries([&](const GradedSeries& s) { return graded_derivative(s, *v); }, -deg);
}

std::vector<VarId> ChainComplex::t_like_variables() const
{
    std::vector<VarId> out;
    const auto& table = *space_.table();
    for (VarId v = 0; v < table.size(); ++v)
        if (table.is_t_like(v)) out.push_back(v);
    return out;
}

std::vector<VarId> ChainComplex::wedge_variables() const
{
    std::vector<VarId> out;
    if (!data_.fiber) return out;
    int n = static_cast<int>(data_.fiber->basis.size());
    for (int b = n; b < 2 * n; ++b)
        for (int j = 0; j <= space_.max_level(); ++j) out.push_back(space_.t(b, j));
    return out;
}

LinearChainMap ChainComplex::at_zero(const LinearChainMap& m) const
{
    auto vars = t_like_variables();
    return set_zero(m, vars);
}

TruncationPolicy ChainComplex::residual_truncation() const
{
    TruncationPolicy p;
    p.max_t_order = data_.bounds.max_points - 3;
    p.max_z_order = data_.bounds.max_degree;
    return p;
}

ChainComplex build_differential(const ChainComplexData& data) { return ChainComplex(data); }

DSquaredReport verify_d_squared(const ChainComplex& complex)
{
    const auto& d = complex.differential();
    TruncationPolicy exact;
    exact.max_t_order = complex.data().bounds.max_points - 2;
    exact.max_z_order = complex.data().bounds.max_degree;
    DSquaredReport rep{truncate(compose(d, d), exact), {}};
    for (auto [r, c] : rep.residual.nonzero_entries())
        rep.offending.emplace_back(complex.generators()[c].id, complex.generators()[r].id);
    return rep;
}

// ---------------------------------------------------------------- RationalFunction

RationalFunction::RationalFunction(TablePtr table)
    : num_(table), den_(GradedSeries::constant(table, 1))
{
}

RationalFunction::RationalFunction(GradedSeries num)
    : num_(num.with_truncation({})), den_(GradedSeries::constant(num.table(), 1))
{
}

RationalFunction::RationalFunction(GradedSeries num, GradedSeries den)
    : num_(num.with_truncation({})), den_(den.with_truncation({}))
{
    if (den_.is_zero()) throw InvalidInput("rational function with zero denominator");
    tidy();
}

void RationalFunction::tidy()
{
    if (num_.is_zero()) {
        den_ = GradedSeries::constant(den_.table(), 1);
        return;
    }
    if (den_.size() == 1 && den_.terms().begin()->first.is_one()) {
        Rational c = den_.terms().begin()->second;
        num_ *= Rational(1 / c);
        den_ = GradedSeries::constant(den_.table(), 1);
    }
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& o)
{
    if (den_ == o.den_) num_ += o.num_;
    else {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ = den_ * o.den_;
    }
    tidy();
    return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o)
{
    RationalFunction neg = o;
    neg.num_ = -neg.num_;
    return *this += neg;
}

RationalFunction& RationalFunction::operator*=(const RationalFunction& o)
{
    num_ = num_ * o.num_;
    den_ = den_ * o.den_;
    tidy();
    return *this;
}

RationalFunction& RationalFunction::operator/=(const RationalFunction& o)
{
    if (o.is_zero()) throw InvalidInput("division by zero rational function");
    num_ = num_ * o.den_;
    den_ = den_ * o.num_;
    tidy();
    return *this;
}

bool RationalFunction::operator==(const RationalFunction& o) const
{
    return num_ * o.den_ == o.num_ * den_;
}

std::string RationalFunction::to_string() const
{
    auto one = GradedSeries::constant(den_.table(), 1);
    if (den_ == one) return num_.to_string();
    return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

RFMatrix to_rf_matrix(const LinearChainMap& m)
{
    const auto& table = *m.table();
    RFMatrix out(m.rows(), RFVector(m.cols(), RationalFunction(m.table())));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const auto& s = m.at(r, c);
            for (const auto& [mono, coef] : s.terms())
                for (auto [v, e] : mono.factors)
                    if (table.kind(v) != VarKind::Z) throw InvalidInput("chain map entry is not t-free");
            out[r][c] = RationalFunction(s);
        }
    return out;
}

RFVector apply_matrix(const RFMatrix& m, const RFVector& v)
{
    if (m.empty()) return {};
    RFVector out(m.size(), RationalFunction(v.front().num().table()));
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c)
            if (!m[r][c].is_zero() && !v[c].is_zero()) out[r] += m[r][c] * v[c];
    return out;
}

std::size_t rank(RFMatrix m)
{
    std::size_t r = 0;
    std::size_t cols = m.empty() ? 0 : m.front().size();
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c].is_zero()) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = r + 1; i < m.size(); ++i) {
            if (m[i][c].is_zero()) continue;
            RationalFunction f = m[i][c];
            RationalFunction piv = m[r][c];
            // row_i ← piv·row_i − f·row_r keeps entries polynomial
            for (std::size_t k = c; k < cols; ++k) m[i][k] = piv * m[i][k] - f * m[r][k];
        }
        ++r;
    }
    return r;
}

std::vector<RFVector> kernel_basis(const RFMatrix& m, const std::vector<std::size_t>& cols, std::size_t width)
{
    std::vector<RFVector> out;
    if (cols.empty()) return out;
    TablePtr table = m.empty() ? nullptr : m.front().front().num().table();
    if (m.empty()) {
        for (std::size_t k = 0; k < cols.size(); ++k) out.emplace_back();
        return out;
    }
    RFMatrix a(m.size(), RFVector());
    for (std::size_t r = 0; r < m.size(); ++r)
        for (auto c : cols) a[r].push_back(m[r][c]);
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols.size() && r < a.size(); ++c) {
        std::size_t p = r;
        while (p < a.size() && a[p][c].is_zero()) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[r]);
        RationalFunction piv = a[r][c];
        for (auto& x : a[r]) x /= piv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            RationalFunction f = a[i][c];
            for (std::size_t k = 0; k < cols.size(); ++k) a[i][k] -= f * a[r][k];
        }
        pivots.push_back(c);
        ++r;
    }
    for (std::size_t free = 0; free < cols.size(); ++free) {
        if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
        RFVector v(width, RationalFunction(table));
        v[cols[free]] = RationalFunction(GradedSeries::constant(table, 1));
        for (std::size_t i = 0; i < pivots.size(); ++i)
            v[cols[pivots[i]]] = RationalFunction(table) - a[i][free];
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------- Homology

namespace {

std::size_t rank_of_vectors(const std::vector<RFVector>& vs) { return rank(RFMatrix(vs.begin(), vs.end())); }

} // namespace

Homology::Homology(const ChainComplex& complex)
{
    auto sq = verify_d_squared(complex);
    if (!sq.zero()) throw InvalidInput("d squared is not zero");
    d0_ = to_rf_matrix(complex.at_zero(complex.differential()));
    const auto& gens = complex.generators();
    std::size_t n = gens.size();
    auto table = complex.space().table();

    for (int k = 0; k < complex.data().model.h2_rank(); ++k)
        modulus_ = std::gcd(modulus_, std::abs(table->degree(complex.space().z(k))));
    auto key = [&](int d) { return modulus_ ? ((d % modulus_) + modulus_) % modulus_ : d; };

    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (!d0_[r][c].is_zero() && key(gens[c].degree - 1) != key(gens[r].degree))
                throw InvalidInput("differential is not homogeneous of degree -1");

    std::map<int, std::vector<std::size_t>> by_degree;
    for (std::size_t k = 0; k < n; ++k) by_degree[key(gens[k].degree)].push_back(k);

    for (std::size_t c = 0; c < n; ++c) {
        RFVector col(n, RationalFunction(table));
        bool nz = false;
        for (std::size_t r = 0; r < n; ++r) {
            col[r] = d0_[r][c];
            nz = nz || !col[r].is_zero();
        }
        if (nz) boundaries_.push_back(std::move(col));
    }
    image_rank_ = rank_of_vectors(boundaries_);

    for (const auto& [d, cols] : by_degree) {
        auto cyc = kernel_basis(d0_, cols, n);
        std::vector<RFVector> span;
        auto up = by_degree.find(key(d + 1));
        if (up != by_degree.end())
            for (auto c : up->second) {
                RFVector col(n, RationalFunction(table));
                for (std::size_t r = 0; r < n; ++r) col[r] = d0_[r][c];
                span.push_back(std::move(col));
            }
        std::size_t base = rank_of_vectors(span);
        int count = 0;
        for (const auto& z : cyc) {
            span.push_back(z);
            std::size_t now = rank_of_vectors(span);
            if (now > base) {
                base = now;
                reps_.push_back(z);
                ++count;
            } else {
                span.pop_back();
            }
            cycles_.push_back(z);
        }
        betti_[d] = count;
    }
}

int Homology::total() const
{
    int t = 0;
    for (const auto& [d, b] : betti_) t += b;
    return t;
}

bool Homology::is_cycle(const RFVector& v) const
{
    auto w = apply_matrix(d0_, v);
    return std::all_of(w.begin(), w.end(), [](const RationalFunction& x) { return x.is_zero(); });
}

bool Homology::is_boundary(const RFVector& v) const
{
    if (std::all_of(v.begin(), v.end(), [](const RationalFunction& x) { return x.is_zero(); })) return true;
    auto vs = boundaries_;
    vs.push_back(v);
    return rank_of_vectors(vs) == image_rank_;
}

// ---------------------------------------------------------------- recursion identities

LinearChainMap apply_pair_operator(const LinearChainMap& m, PairOrdering pair)
{
    if (pair == PairOrdering::PairCount)
        return m.map_entries(
            [](const GradedSeries& s) {
                auto c = apply_N_check(s);
                return apply_N(c) - c;
            },
            1);
    return m.map_entries([](const GradedSeries& s) { return apply_N_check(apply_N(s) - s); }, 1);
}

namespace {

LinearChainMap dress(const LinearChainMap& m, SectionChoice identity)
{
    switch (identity) {
    case SectionChoice::OneOne: return m.map_entries([](const GradedSeries& s) { return apply_N(s); }, 0);
    case SectionChoice::ZeroTwo: return m.map_entries([](const GradedSeries& s) { return apply_N_N_minus_1(s); }, 0);
    default: return m;
    }
}

GradedSeries second_derivative(const ChainComplex& cx, int cls, int level, int mu)
{
    return cx.space().dt(cx.space().dt(cx.potential(), cls, level), mu, 0);
}

void check_level(const ChainComplex& cx, Insertion a)
{
    if (a.level < 1 || a.level > cx.space().max_level()) throw InvalidInput("recursion level out of range");
    if (a.cls < 0 || static_cast<std::size_t>(a.cls) >= cx.data().model.basis.size())
        throw InvalidInput("class index out of range");
}

// Both sides of an identity built from the maps D(α,p) and Ď(α,p) and the operators Ň∂, N∂ etc.
struct IdentityMaps {
    std::function<LinearChainMap(int, int)> d;        // plays ∂_{(α,p)} in the identity
    std::function<LinearChainMap(int, int)> dcheck;   // plays ∂_{(α̌,p)}, or empty
    std::function<LinearChainMap(int, int)> d_by_t;   // ∂/∂t^{μ,0} of d(α,p), for the bubble term
    LinearChainMap n_check;                           // Ň∂
    std::optional<LinearChainMap> n_plain;            // N∂ partner of dcheck
    LinearChainMap pair_check;
    std::optional<LinearChainMap> pair_plain;
};

LinearChainMap identity_residual(const ChainComplex& cx, SectionChoice identity, Insertion a,
                                 const TrrOptions& options, const IdentityMaps& maps)
{
    const auto& model = cx.data().model;
    const auto& eta_inv = model.eta_inverse();
    int n = static_cast<int>(model.basis.size());
    int i = a.level;
    LinearChainMap lhs = dress(maps.d(a.cls, i), identity);
    LinearChainMap rhs = Rational(0) * lhs;
    for (int mu = 0; mu < n; ++mu) {
        GradedSeries c = second_derivative(cx, a.cls, i - 1, mu);
        if (c.is_zero()) continue;
        for (int nu = 0; nu < n; ++nu) {
            const Rational& e = eta_inv[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
            if (e == 0) continue;
            rhs += e * scale(c, dress(maps.d(nu, 0), identity));
        }
    }
    LinearChainMap prev = maps.d(a.cls, i - 1);
    if (identity == SectionChoice::OneOne) {
        rhs += Rational(1, 2) * graded_anticommutator(prev, maps.n_check);
        if (maps.dcheck) rhs += Rational(1, 2) * graded_anticommutator(maps.dcheck(a.cls, i - 1), *maps.n_plain);
    } else if (identity == SectionChoice::ZeroTwo) {
        rhs += graded_anticommutator(prev, maps.pair_check);
        if (maps.dcheck) rhs += graded_anticommutator(maps.dcheck(a.cls, i - 1), *maps.pair_plain);
        if (options.sphere_bubble)
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu) {
                    const Rational& e = eta_inv[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
                    if (e == 0) continue;
                    GradedSeries c = apply_N_N_minus_1(cx.space().dt(cx.potential(), nu, 0));
                    if (c.is_zero()) continue;
                    rhs += e * scale(c, maps.d_by_t(a.cls * n + mu, i - 1));
                }
    }
    return lhs - rhs;
}

LinearChainMap noneq_unchecked(const ChainComplex& cx, SectionChoice identity, Insertion a, const TrrOptions& options)
{
    if (cx.data().orbits.equivariant) throw InvalidInput("non-equivariant identities need hat/check data");
    check_level(cx, a);
    int n = static_cast<int>(cx.data().model.basis.size());
    const auto& d = cx.differential();
    IdentityMaps maps{
        [&](int c, int p) { return cx.decorated_check(c, p); },
        {},
        [&, n](int packed, int p) {
            int c = packed / n, mu = packed % n;
            return cx.decorated_check(c, p).map_entries(
                [&](const GradedSeries& s) { return cx.space().dt(s, mu, 0); },
                -cx.space().table()->degree(cx.space().t(mu, 0)));
        },
        d.map_entries([](const GradedSeries& s) { return apply_N_check(s); }, 1),
        std::nullopt,
        apply_pair_operator(d, options.pair),
        std::nullopt};
    return truncate(identity_residual(cx, identity, a, options, maps), cx.residual_truncation());
}

void require_label(const ChainComplex& cx, SectionChoice identity)
{
    if (cx.data().counts.label != identity) throw InvalidLabel(label_mismatch(identity, cx.data().counts.label));
}

bool maps_cycles_to_boundaries(const RFMatrix& m, const Homology& h)
{
    for (const auto& z : h.cycles())
        if (!h.is_boundary(apply_matrix(m, z))) return false;
    return true;
}

} // namespace

LinearChainMap noneq_trr_residual(const ChainComplex& complex, SectionChoice identity, Insertion a,
                                  const TrrOptions& options)
{
    if (identity == SectionChoice::Generic) throw InvalidLabel("no identity is attached to generic data");
    require_label(complex, identity);
    return noneq_unchecked(complex, identity, a, options);
}

std::vector<TrrCheck> verify_noneq_trr(const ChainComplex& complex, const TrrOptions& options)
{
    std::vector<TrrCheck> out;
    SectionChoice label = complex.data().counts.label;
    int n = static_cast<int>(complex.data().model.basis.size());
    std::optional<Homology> h;
    for (int c = 0; c < n; ++c)
        for (int i = 1; i <= complex.space().max_level(); ++i) {
            TrrCheck chk;
            chk.insertion = {c, i};
            if (label == SectionChoice::Generic) {
                if (!h) h.emplace(complex);
                chk.identity = SectionChoice::TwoZero;
                chk.chain_level = false;
                auto res = noneq_unchecked(complex, SectionChoice::TwoZero, chk.insertion, options);
                chk.nonzero = res.nonzero_entries().size();
                chk.passed = maps_cycles_to_boundaries(to_rf_matrix(complex.at_zero(res)), *h);
                chk.detail = chk.passed ? "residual is exact on cycles" : "residual is not exact on cycles";
            } else {
                chk.identity = label;
                auto res = noneq_trr_residual(complex, label, chk.insertion, options);
                chk.nonzero = res.nonzero_entries().size();
                chk.passed = res.is_zero();
                chk.detail = chk.passed ? "chain-level residual vanishes"
                                        : std::to_string(chk.nonzero) + " nonzero residual entries";
            }
            out.push_back(chk);
        }
    return out;
}

namespace {

struct Blocks {
    std::vector<std::size_t> hats, checks;
};

Blocks hat_check_blocks(const ChainComplex& cx)
{
    Blocks b;
    const auto& gens = cx.generators();
    for (std::size_t k = 0; k < gens.size(); ++k)
        (gens[k].kind == GeneratorKind::Hat ? b.hats : b.checks).push_back(k);
    return b;
}

} // namespace

EquivariantMaps split_blocks(const ChainComplex& complex)
{
    if (complex.data().orbits.equivariant) throw NonSplitData("equivariant data has no hat/check blocks");
    auto b = hat_check_blocks(complex);
    const auto& d = complex.differential();
    auto hh = d.block(b.hats, b.hats);
    auto cc = d.block(b.checks, b.checks, -1);
    auto ch = d.block(b.hats, b.checks);
    for (std::size_t r = 0; r < b.hats.size(); ++r)
        for (std::size_t c = 0; c < b.hats.size(); ++c)
            if (!(hh.at(r, c) == cc.at(r, c))) throw NonSplitData("hat and check diagonal blocks differ");
    if (!ch.is_zero()) throw NonSplitData("check-to-hat block is nonzero");
    return {hh, d.block(b.checks, b.hats, -1)};
}

LinearChainMap equiv_trr_residual(const ChainComplex& complex, SectionChoice identity, Insertion a,
                                  const TrrOptions& options)
{
    if (identity == SectionChoice::Generic) throw InvalidLabel("no identity is attached to generic data");
    require_label(complex, identity);
    split_blocks(complex);
    check_level(complex, a);
    auto b = hat_check_blocks(complex);
    auto hh = [b](const LinearChainMap& m) { return m.block(b.hats, b.hats); };
    auto hc = [b](const LinearChainMap& m) { return m.block(b.checks, b.hats, -1); };
    const auto& d = complex.differential();
    int n = static_cast<int>(complex.data().model.basis.size());
    auto n_check = d.map_entries([](const GradedSeries& s) { return apply_N_check(s); }, 1);
    auto pair = apply_pair_operator(d, options.pair);
    IdentityMaps maps{
        [&](int c, int p) { return hc(complex.decorated_check(c, p)); },
        [&](int c, int p) { return hh(complex.decorated_check(c, p)); },
        [&, n](int packed, int p) {
            int c = packed / n, mu = packed % n;
            return hc(complex.decorated_check(c, p).map_entries(
                [&](const GradedSeries& s) { return complex.space().dt(s, mu, 0); },
                -complex.space().table()->degree(complex.space().t(mu, 0))));
        },
        hh(n_check),
        hc(n_check),
        hh(pair),
        hc(pair)};
    auto res = identity_residual(complex, identity, a, options, maps);
    auto vars = complex.wedge_variables();
    for (VarId v = 0; v < complex.space().table()->size(); ++v)
        if (complex.space().table()->kind(v) == VarKind::TCheck) vars.push_back(v);
    return truncate(set_zero(res, vars), complex.residual_truncation());
}

// ---------------------------------------------------------------- contact, action

bool ContactReport::passed() const
{
    if (skipped) return true;
    return std::all_of(entries.begin(), entries.end(),
                       [](const ContactEntry& e) { return e.induced_zero && e.coefficient_zero; });
}

ContactReport verify_contact_vanishing(const ChainComplex& complex)
{
    ContactReport rep;
    if (!complex.data().contact) {
        rep.skipped = true;
        rep.reason = "model is not flagged contact; vanishing needs the point potential";
        return rep;
    }
    Homology h(complex);
    auto tvars = complex.t_like_variables();
    int n = static_cast<int>(complex.data().model.basis.size());
    for (int c = 0; c < n; ++c)
        for (int p = 1; p <= complex.space().max_level(); ++p) {
            ContactEntry e;
            e.insertion = {c, p};
            e.induced_zero = maps_cycles_to_boundaries(to_rf_matrix(complex.at_zero(complex.decorated(c, p))), h);
            e.coefficient_zero = true;
            for (int mu = 0; mu < n; ++mu)
                if (!set_zero(second_derivative(complex, c, p - 1, mu), tvars).is_zero()) e.coefficient_zero = false;
            rep.entries.push_back(e);
        }
    return rep;
}

bool QuantumActionReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const ActionCheck& c) { return c.exact; });
}

QuantumActionReport quantum_action(const ChainComplex& complex, const Homology& homology)
{
    if (complex.data().orbits.equivariant) throw InvalidInput("the action needs non-equivariant data");
    const auto& model = complex.data().model;
    int n = static_cast<int>(model.basis.size());
    auto table = complex.space().table();
    std::vector<RFMatrix> act;
    for (int a = 0; a < n; ++a) act.push_back(to_rf_matrix(complex.at_zero(complex.decorated_check(a, 0))));

    for (int a = 0; a < n; ++a) {
        for (const auto& z : homology.cycles())
            if (!homology.is_cycle(apply_matrix(act[a], z)))
                throw ActionDoesNotDescend("action of class '" + model.basis[a].id + "' does not preserve cycles");
        for (const auto& bd : homology.boundaries())
            if (!homology.is_boundary(apply_matrix(act[a], bd)))
                throw ActionDoesNotDescend("action of class '" + model.basis[a].id + "' does not preserve boundaries");
    }

    auto c = quantum_product(complex.potential(), complex.space());
    QuantumActionReport rep;
    const auto& reps = homology.representatives();
    for (std::size_t k = 0; k < reps.size(); ++k) {
        auto diff = apply_matrix(act[model.unit], reps[k]);
        for (std::size_t r = 0; r < diff.size(); ++r) diff[r] -= reps[k][r];
        rep.checks.push_back({model.unit, std::nullopt, k, homology.is_boundary(diff)});
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (std::size_t k = 0; k < reps.size(); ++k) {
                auto lhs = apply_matrix(act[a], apply_matrix(act[b], reps[k]));
                for (int nu = 0; nu < n; ++nu) {
                    const auto& coef = c[a][b][nu];
                    if (coef.is_zero()) continue;
                    auto img = apply_matrix(act[nu], reps[k]);
                    RationalFunction rc(coef);
                    for (std::size_t r = 0; r < lhs.size(); ++r) lhs[r] -= rc * img[r];
                }
                rep.checks.push_back({a, b, k, homology.is_boundary(lhs)});
            }
    return rep;
}

// ---------------------------------------------------------------- fixtures

TargetModel circle_product(const TargetModel& fiber)
{
    TargetModel v;
    v.name = fiber.name + "-x-S1";
    v.dim = fiber.dim + 1;
    std::size_t n = fiber.basis.size();
    v.basis = fiber.basis;
    for (const auto& b : fiber.basis) v.basis.push_back({b.id + "^dt", b.degree + 1});
    v.unit = fiber.unit;
    v.chern = fiber.chern;
    v.eta.assign(2 * n, std::vector<Rational>(2 * n, Rational(0)));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            v.eta[a][n + b] = fiber.eta[a][b];
            v.eta[n + b][a] = fiber.eta[b][a];
        }
    return v;
}

namespace {

// Multisets of size ≤ k over items [0, m), as nondecreasing index lists.
void multisets(int m, int k, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f)
{
    f(cur);
    if (static_cast<int>(cur.size()) == k) return;
    int start = cur.empty() ? 0 : cur.back();
    for (int x = start; x < m; ++x) {
        cur.push_back(x);
        multisets(m, k, cur, f);
        cur.pop_back();
    }
}

void curve_classes(int rank, int max_total, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f)
{
    if (static_cast<int>(cur.size()) == rank) {
        f(cur);
        return;
    }
    int used = std::accumulate(cur.begin(), cur.end(), 0);
    for (int d = 0; used + d <= max_total; ++d) {
        cur.push_back(d);
        curve_classes(rank, max_total, cur, f);
        cur.pop_back();
    }
}

} // namespace

FloerModel build_floer_model(const TargetModel& fiber, int periods, const ReconstructionBounds& bounds,
                             SectionChoice label)
{
    fiber.validate();
    Reconstructor rec(fiber, bounds);
    int n = static_cast<int>(fiber.basis.size());
    int L = bounds.max_level;
    const auto& eta_inv = fiber.eta_inverse();

    FloerModel out;
    out.floer.name = fiber.name + "-floer";
    out.floer.model = fiber;
    out.floer.bounds = bounds;
    out.floer.orbits.equivariant = false;
    out.floer.counts.label = label;
    out.cylinder.name = fiber.name + "-x-S1-cylinder";
    out.cylinder.model = circle_product(fiber);
    out.cylinder.fiber = fiber;
    out.cylinder.bounds = bounds;
    out.cylinder.orbits.equivariant = false;
    out.cylinder.counts.label = label;

    auto orbit_id = [&](int k, int b) { return "k" + std::to_string(k) + "_" + fiber.basis[b].id; };
    for (int k = 1; k <= periods; ++k)
        for (int b = 0; b < n; ++b) {
            OrbitSpec o{orbit_id(k, b), fiber.basis[static_cast<std::size_t>(b)].degree, k, true};
            out.floer.orbits.orbits.push_back(o);
            out.cylinder.orbits.orbits.push_back(o);
        }

    int items = n * (L + 1);
    std::vector<int> cur;
    std::vector<std::vector<int>> xs;
    multisets(items, bounds.max_points - 3, cur, [&](const std::vector<int>& x) { xs.push_back(x); });
    std::vector<std::vector<int>> ds;
    std::vector<int> dcur;
    curve_classes(fiber.h2_rank(), bounds.max_degree, dcur, [&](const std::vector<int>& d) { ds.push_back(d); });

    for (int a = 0; a < n; ++a)
        for (int i = 0; i <= L; ++i)
            for (const auto& x : xs)
                for (const auto& d : ds) {
                    std::vector<CountInsertion> rest;
                    std::vector<Insertion> base{{a, i}};
                    for (int item : x) {
                        rest.push_back({item / (L + 1), item % (L + 1), false});
                        base.push_back({item / (L + 1), item % (L + 1)});
                    }
                    for (int beta = 0; beta < n; ++beta)
                        for (int lam = 0; lam < n; ++lam) {
                            Rational v = 0;
                            for (int kap = 0; kap < n; ++kap) {
                                const Rational& e = eta_inv[static_cast<std::size_t>(kap)][static_cast<std::size_t>(lam)];
                                if (e == 0) continue;
                                auto ins = base;
                                ins.push_back({beta, 0});
                                ins.push_back({kap, 0});
                                CorrelatorKey key(ins, d);
                                if (!fiber.passes_dimension(key)) continue;
                                v += rec.value(key) * e;
                            }
                            if (v == 0) continue;
                            std::vector<CountInsertion> constrained{{a, i, true}};
                            constrained.insert(constrained.end(), rest.begin(), rest.end());
                            std::vector<CountInsertion> wedge{{n + a, i, false}};
                            wedge.insert(wedge.end(), rest.begin(), rest.end());
                            std::vector<CountInsertion> wedge_constrained{{n + a, i, true}};
                            wedge_constrained.insert(wedge_constrained.end(), rest.begin(), rest.end());
                            for (int k = 1; k <= periods; ++k) {
                                std::string from = orbit_id(k, beta), to = orbit_id(k, lam);
                                for (const char* side : {".hat", ".check"}) {
                                    out.floer.counts.entries.push_back({from + side, to + side, constrained, d, v});
                                    out.cylinder.counts.entries.push_back({from + side, to + side, constrained, d, v});
                                    out.cylinder.counts.entries.push_back({from + side, to + side, wedge, d, v});
                                }
                                out.cylinder.counts.entries.push_back({from + ".hat", to + ".check", wedge_constrained, d, v});
                            }
                        }
                }
    return out;
}

ChainComplexData contact_fixture()
{
    ChainComplexData data;
    data.name = "contact";
    data.model = TargetModel::point();
    data.contact = true;
    data.bounds = {5, 2, 0};
    data.orbits.equivariant = true;
    data.orbits.orbits = {{"a", 3, 1, true}, {"b", 2, 1, true}, {"e", 3, 1, true}, {"x", 4, 2, false}};
    data.counts.entries = {{"a", "b", {}, {}, Rational(1)}, {"e", "b", {{0, 1, false}}, {}, Rational(1)}};
    return data;
}

ChainComplexData generic_fixture()
{
    ChainComplexData data;
    data.name = "generic";
    data.model = TargetModel::point();
    data.bounds = {5, 2, 0};
    data.orbits.equivariant = false;
    data.orbits.orbits = {{"f", 4, 1, true}, {"a", 3, 1, true}, {"e", 3, 1, true}};
    for (const char* side : {".hat", ".check"}) {
        std::string s = side;
        data.counts.entries.push_back({"f" + s, "a" + s, {}, {}, Rational(1)});
        data.counts.entries.push_back({"e" + s, "a" + s, {{0, 1, true}}, {}, Rational(1)});
    }
    return data;
}

} // namespace sftrec
