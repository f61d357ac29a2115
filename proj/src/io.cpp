#include <sftrec/io.hpp>

#include <fstream>
#include <sstream>

namespace sftrec::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw InvalidInput(path + ": " + msg);
}

const Json& field(const Json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

int int_from(const Json& j, const std::string& path)
{
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

int int_field(const Json& j, const std::string& key, const std::string& path)
{
    return int_from(field(j, key, path), path + "." + key);
}

int int_or(const Json& j, const std::string& key, int fallback, const std::string& path)
{
    return j.contains(key) ? int_field(j, key, path) : fallback;
}

bool bool_or(const Json& j, const std::string& key, bool fallback, const std::string& path)
{
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return j[key].get<bool>();
}

std::string string_field(const Json& j, const std::string& key, const std::string& path)
{
    const auto& v = field(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

const Json& array_field(const Json& j, const std::string& key, const std::string& path)
{
    const auto& v = field(j, key, path);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    return v;
}

std::vector<int> int_list(const Json& j, const std::string& path)
{
    if (!j.is_array()) fail(path, "expected an array");
    std::vector<int> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(int_from(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

RationalMatrix matrix_from(const Json& j, const std::string& path)
{
    if (!j.is_array()) fail(path, "expected an array of rows");
    RationalMatrix m;
    for (std::size_t r = 0; r < j.size(); ++r) {
        std::string rp = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array()) fail(rp, "expected an array");
        std::vector<Rational> row;
        for (std::size_t c = 0; c < j[r].size(); ++c)
            row.push_back(rational_from(j[r][c], rp + "[" + std::to_string(c) + "]"));
        m.push_back(std::move(row));
    }
    return m;
}

Json matrix_json(const RationalMatrix& m)
{
    Json out = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(rational_json(x));
        out.push_back(r);
    }
    return out;
}

void check_schema(const Json& j, const char* schema, const std::string& path)
{
    std::string s = string_field(j, "schema", path);
    if (s != schema) fail(path + ".schema", "expected '" + std::string(schema) + "', found '" + s + "'");
}

int class_index(const TargetModel& m, const Json& j, const std::string& path)
{
    if (!j.is_string()) fail(path, "expected a class id");
    auto id = j.get<std::string>();
    for (std::size_t k = 0; k < m.basis.size(); ++k)
        if (m.basis[k].id == id) return static_cast<int>(k);
    fail(path, "unknown class '" + id + "'");
}

Json pair_json(DivisorPair p) { return Json::array({p.first, p.second}); }

DivisorPair pair_from(const Json& j, const std::string& path)
{
    auto v = int_list(j, path);
    if (v.size() != 2) fail(path, "expected a pair of marked points");
    if (v[0] < 1 || v[1] > 5 || v[0] >= v[1]) fail(path, "expected 1 <= a < b <= 5");
    return make_pair_divisor(v[0], v[1]);
}

Json bounds_json(const ReconstructionBounds& b)
{
    return Json{{"max_points", b.max_points}, {"max_level", b.max_level}, {"max_degree", b.max_degree}};
}

ReconstructionBounds bounds_from(const Json& j, const std::string& path)
{
    ReconstructionBounds b;
    b.max_points = int_field(j, "max_points", path);
    b.max_level = int_field(j, "max_level", path);
    b.max_degree = int_or(j, "max_degree", 0, path);
    return b;
}

} // namespace

Json rational_json(const Rational& q) { return to_string(q); }

Rational rational_from(const Json& j, const std::string& path)
{
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_string()) fail(path, "expected a rational \"n/d\"");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

Json to_json(const TargetModel& m)
{
    Json j;
    j["schema"] = kModelSchema;
    j["name"] = m.name;
    j["dim"] = m.dim;
    j["basis"] = Json::array();
    for (const auto& b : m.basis) j["basis"].push_back({{"id", b.id}, {"degree", b.degree}});
    j["unit"] = m.basis.at(static_cast<std::size_t>(m.unit)).id;
    j["divisor"] = m.divisor ? Json(m.basis.at(static_cast<std::size_t>(*m.divisor)).id) : Json(nullptr);
    j["eta"] = matrix_json(m.eta);
    j["chern"] = m.chern;
    j["divisor_pairing"] = Json::array();
    for (const auto& x : m.divisor_pairing) j["divisor_pairing"].push_back(rational_json(x));
    j["divisor_cup"] = matrix_json(m.divisor_cup);
    j["primaries"] = Json::array();
    for (const auto& p : m.primaries) {
        Json cls = Json::array();
        for (int c : p.classes) cls.push_back(m.basis.at(static_cast<std::size_t>(c)).id);
        j["primaries"].push_back({{"classes", cls}, {"degree", p.degree}, {"value", rational_json(p.value)}});
    }
    j["primary_max_points"] = m.primary_max_points;
    j["primary_max_degree"] = m.primary_max_degree;
    return j;
}

TargetModel model_from_json(const Json& j, const std::string& path)
{
    check_schema(j, kModelSchema, path);
    TargetModel m;
    m.name = string_field(j, "name", path);
    m.dim = int_field(j, "dim", path);
    const auto& basis = array_field(j, "basis", path);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        std::string bp = path + ".basis[" + std::to_string(k) + "]";
        m.basis.push_back({string_field(basis[k], "id", bp), int_field(basis[k], "degree", bp)});
    }
    m.unit = class_index(m, field(j, "unit", path), path + ".unit");
    if (j.contains("divisor") && !j["divisor"].is_null()) m.divisor = class_index(m, j["divisor"], path + ".divisor");
    m.eta = matrix_from(field(j, "eta", path), path + ".eta");
    if (j.contains("chern")) m.chern = int_list(j["chern"], path + ".chern");
    if (j.contains("divisor_pairing")) {
        const auto& dp = j["divisor_pairing"];
        if (!dp.is_array()) fail(path + ".divisor_pairing", "expected an array");
        for (std::size_t k = 0; k < dp.size(); ++k)
            m.divisor_pairing.push_back(rational_from(dp[k], path + ".divisor_pairing[" + std::to_string(k) + "]"));
    }
    if (j.contains("divisor_cup")) m.divisor_cup = matrix_from(j["divisor_cup"], path + ".divisor_cup");
    if (j.contains("primaries")) {
        const auto& ps = array_field(j, "primaries", path);
        for (std::size_t k = 0; k < ps.size(); ++k) {
            std::string pp = path + ".primaries[" + std::to_string(k) + "]";
            PrimaryValue p;
            const auto& cls = array_field(ps[k], "classes", pp);
            for (std::size_t c = 0; c < cls.size(); ++c)
                p.classes.push_back(class_index(m, cls[c], pp + ".classes[" + std::to_string(c) + "]"));
            p.degree = ps[k].contains("degree") ? int_list(ps[k]["degree"], pp + ".degree")
                                                : std::vector<int>(m.chern.size(), 0);
            p.value = rational_from(field(ps[k], "value", pp), pp + ".value");
            m.primaries.push_back(std::move(p));
        }
    }
    m.primary_max_points = int_or(j, "primary_max_points", 3, path);
    m.primary_max_degree = int_or(j, "primary_max_degree", 0, path);
    m.validate();
    return m;
}

Json to_json(const ChainComplexData& d)
{
    Json j;
    j["schema"] = kCountsSchema;
    j["name"] = d.name;
    j["label"] = std::string(to_string(d.counts.label));
    j["equivariant"] = d.orbits.equivariant;
    j["contact"] = d.contact;
    j["bounds"] = bounds_json(d.bounds);
    j["model"] = to_json(d.model);
    if (d.fiber) j["fiber"] = to_json(*d.fiber);
    j["orbits"] = Json::array();
    for (const auto& o : d.orbits.orbits)
        j["orbits"].push_back({{"id", o.id}, {"degree", o.degree}, {"multiplicity", o.multiplicity}, {"good", o.good}});
    j["entries"] = Json::array();
    for (const auto& e : d.counts.entries) {
        Json ins = Json::array();
        for (const auto& i : e.insertions)
            ins.push_back({{"class", d.model.basis.at(static_cast<std::size_t>(i.cls)).id},
                           {"level", i.level},
                           {"constrained", i.constrained}});
        j["entries"].push_back(
            {{"from", e.from}, {"to", e.to}, {"insertions", ins}, {"degree", e.degree}, {"value", rational_json(e.value)}});
    }
    return j;
}

ChainComplexData counts_from_json(const Json& j)
{
    const std::string path = "counts";
    check_schema(j, kCountsSchema, path);
    ChainComplexData d;
    d.name = string_field(j, "name", path);
    std::string label = string_field(j, "label", path);
    auto sc = section_choice_from_string(label);
    if (!sc) fail(path + ".label", "unknown section choice '" + label + "'");
    d.counts.label = *sc;
    d.orbits.equivariant = bool_or(j, "equivariant", true, path);
    d.contact = bool_or(j, "contact", false, path);
    d.bounds = bounds_from(field(j, "bounds", path), path + ".bounds");
    d.model = model_from_json(field(j, "model", path), path + ".model");
    if (j.contains("fiber")) d.fiber = model_from_json(j["fiber"], path + ".fiber");
    const auto& orbits = array_field(j, "orbits", path);
    for (std::size_t k = 0; k < orbits.size(); ++k) {
        std::string op = path + ".orbits[" + std::to_string(k) + "]";
        d.orbits.orbits.push_back({string_field(orbits[k], "id", op), int_field(orbits[k], "degree", op),
                                   int_or(orbits[k], "multiplicity", 1, op), bool_or(orbits[k], "good", true, op)});
    }
    const auto& entries = array_field(j, "entries", path);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        std::string ep = path + ".entries[" + std::to_string(k) + "]";
        const auto& e = entries[k];
        CountEntry ce;
        ce.from = string_field(e, "from", ep);
        ce.to = string_field(e, "to", ep);
        if (e.contains("insertions")) {
            const auto& ins = array_field(e, "insertions", ep);
            for (std::size_t i = 0; i < ins.size(); ++i) {
                std::string ip = ep + ".insertions[" + std::to_string(i) + "]";
                ce.insertions.push_back({class_index(d.model, field(ins[i], "class", ip), ip + ".class"),
                                         int_field(ins[i], "level", ip), bool_or(ins[i], "constrained", false, ip)});
            }
        }
        ce.degree = e.contains("degree") ? int_list(e["degree"], ep + ".degree")
                                         : std::vector<int>(d.model.chern.size(), 0);
        ce.value = rational_from(field(e, "value", ep), ep + ".value");
        d.counts.entries.push_back(std::move(ce));
    }
    d.validate();
    return d;
}

Json to_json(const Profiles& p)
{
    Json j;
    j["schema"] = kProfileSchema;
    j["max_cover"] = p.max_cover;
    Json q = Json::object();
    for (auto [n, d] : p.grading.q_degree) q[std::to_string(n)] = d;
    j["grading"] = {{"half_dim", p.grading.half_dim}, {"default_q_degree", p.grading.default_q_degree}, {"q_degree", q}};
    Json tuples = Json::array();
    for (const auto& [t, s] : p.signs.tuples) tuples.push_back({{"tuple", t}, {"sign", s}});
    j["signs"] = {{"default", p.signs.default_sign ? Json(*p.signs.default_sign) : Json(nullptr)},
                  {"tuples", tuples},
                  {"bad_covers", std::vector<int>(p.signs.bad_covers.begin(), p.signs.bad_covers.end())}};
    return j;
}

Profiles profiles_from_json(const Json& j)
{
    const std::string path = "profile";
    check_schema(j, kProfileSchema, path);
    Profiles p;
    p.max_cover = int_or(j, "max_cover", 6, path);
    if (p.max_cover < 1) fail(path + ".max_cover", "must be positive");
    if (j.contains("grading")) {
        const auto& g = j["grading"];
        std::string gp = path + ".grading";
        p.grading.half_dim = int_or(g, "half_dim", p.grading.half_dim, gp);
        p.grading.default_q_degree = int_or(g, "default_q_degree", p.grading.default_q_degree, gp);
        if (g.contains("q_degree")) {
            if (!g["q_degree"].is_object()) fail(gp + ".q_degree", "expected an object keyed by cover");
            for (const auto& [key, val] : g["q_degree"].items()) {
                int n = 0;
                try {
                    n = std::stoi(key);
                } catch (const std::exception&) {
                    fail(gp + ".q_degree", "cover key '" + key + "' is not an integer");
                }
                p.grading.q_degree[n] = int_from(val, gp + ".q_degree." + key);
            }
        }
    }
    if (j.contains("signs")) {
        const auto& s = j["signs"];
        std::string sp = path + ".signs";
        if (s.contains("default")) p.signs.default_sign = s["default"].is_null() ? std::nullopt
                                                                                   : std::optional<int>(int_from(s["default"], sp + ".default"));
        if (s.contains("tuples")) {
            const auto& ts = array_field(s, "tuples", sp);
            for (std::size_t k = 0; k < ts.size(); ++k) {
                std::string tp = sp + ".tuples[" + std::to_string(k) + "]";
                p.signs.tuples[int_list(field(ts[k], "tuple", tp), tp + ".tuple")] = int_field(ts[k], "sign", tp);
            }
        }
        if (s.contains("bad_covers"))
            for (int n : int_list(s["bad_covers"], sp + ".bad_covers")) p.signs.bad_covers.insert(n);
        p.signs.validate();
    }
    return p;
}

Json to_json(const PerturbationLedger& l)
{
    Json j;
    j["schema"] = kLedgerSchema;
    j["psi_point"] = l.psi_point;
    j["entries"] = Json::array();
    for (const auto& e : l.entries) {
        Json pts = Json::array();
        for (const auto& p : e.points) pts.push_back({{"location", pair_json(p.location)}, {"index", rational_json(p.index)}});
        j["entries"].push_back({{"perturbed", pair_json(e.perturbed)},
                                {"weight", rational_json(e.weight)},
                                {"target", pair_json(e.target)},
                                {"points", pts}});
    }
    j["restrictions"] = Json::array();
    for (const auto& r : l.restrictions) {
        Json cs = Json::array();
        for (const auto& c : r.contributions)
            cs.push_back({{"location", pair_json(c.location)}, {"source", pair_json(c.source)}, {"index", rational_json(c.index)}});
        j["restrictions"].push_back({{"divisor", pair_json(r.divisor)}, {"contributions", cs}});
    }
    return j;
}

PerturbationLedger ledger_from_json(const Json& j)
{
    const std::string path = "ledger";
    check_schema(j, kLedgerSchema, path);
    PerturbationLedger l;
    l.psi_point = int_or(j, "psi_point", 1, path);
    if (l.psi_point < 1 || l.psi_point > 5) fail(path + ".psi_point", "must be a marked point 1..5");
    const auto& es = array_field(j, "entries", path);
    for (std::size_t k = 0; k < es.size(); ++k) {
        std::string ep = path + ".entries[" + std::to_string(k) + "]";
        LedgerEntry e;
        e.perturbed = pair_from(field(es[k], "perturbed", ep), ep + ".perturbed");
        e.weight = rational_from(field(es[k], "weight", ep), ep + ".weight");
        e.target = pair_from(field(es[k], "target", ep), ep + ".target");
        const auto& pts = array_field(es[k], "points", ep);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            std::string pp = ep + ".points[" + std::to_string(i) + "]";
            e.points.push_back({pair_from(field(pts[i], "location", pp), pp + ".location"),
                                rational_from(field(pts[i], "index", pp), pp + ".index")});
        }
        l.entries.push_back(std::move(e));
    }
    if (j.contains("restrictions")) {
        const auto& rs = array_field(j, "restrictions", path);
        for (std::size_t k = 0; k < rs.size(); ++k) {
            std::string rp = path + ".restrictions[" + std::to_string(k) + "]";
            RestrictionEntry r;
            r.divisor = pair_from(field(rs[k], "divisor", rp), rp + ".divisor");
            const auto& cs = array_field(rs[k], "contributions", rp);
            for (std::size_t i = 0; i < cs.size(); ++i) {
                std::string cp = rp + ".contributions[" + std::to_string(i) + "]";
                r.contributions.push_back({pair_from(field(cs[i], "location", cp), cp + ".location"),
                                           pair_from(field(cs[i], "source", cp), cp + ".source"),
                                           rational_from(field(cs[i], "index", cp), cp + ".index")});
            }
            l.restrictions.push_back(std::move(r));
        }
    }
    return l;
}

Json to_json(const CorrelatorTable& table, const TargetModel& model)
{
    Json j;
    j["schema"] = kCorrelatorSchema;
    j["model"] = model.name;
    j["bounds"] = bounds_json(table.bounds());
    j["entries"] = Json::array();
    for (const auto& [key, v] : table.entries()) {
        if (v == 0) continue;
        Json ins = Json::array();
        for (const auto& i : key.insertions)
            ins.push_back({{"class", model.basis.at(static_cast<std::size_t>(i.cls)).id}, {"level", i.level}});
        j["entries"].push_back({{"insertions", ins}, {"degree", key.degree}, {"value", rational_json(v)}});
    }
    return j;
}

Json to_json(const GradedSeries& s)
{
    Json out = Json::array();
    const auto& table = *s.table();
    for (const auto& [m, c] : s.terms()) {
        Json mono = Json::object();
        for (auto [v, e] : m.factors) mono[table[v].id] = e;
        out.push_back(Json::array({mono, rational_json(c)}));
    }
    return out;
}

Json read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput(path.string() + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(path.string() + ": parse error: " + e.what());
    }
}

void write_file(const std::filesystem::path& path, const Json& j)
{
    std::ofstream out(path);
    if (!out) throw InvalidInput(path.string() + ": cannot write file");
    out << j.dump(2) << "\n";
}

namespace {

template <class F>
auto load_with(const std::filesystem::path& path, F parse)
{
    auto j = read_file(path);
    try {
        return parse(j);
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

} // namespace

TargetModel load_model(const std::filesystem::path& path)
{
    return load_with(path, [](const Json& j) { return model_from_json(j); });
}

ChainComplexData load_counts(const std::filesystem::path& path)
{
    return load_with(path, [](const Json& j) { return counts_from_json(j); });
}

Profiles load_profiles(const std::filesystem::path& path)
{
    return load_with(path, [](const Json& j) { return profiles_from_json(j); });
}

PerturbationLedger load_ledger(const std::filesystem::path& path)
{
    return load_with(path, [](const Json& j) { return ledger_from_json(j); });
}

} // namespace sftrec::io
