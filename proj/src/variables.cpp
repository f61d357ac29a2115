#include <sftrec/variables.hpp>

#include <map>

namespace sftrec {

namespace {

constexpr std::pair<VarKind, std::string_view> kNames[] = {
    {VarKind::QOrbit, "q"}, {VarKind::POrbit, "p"},  {VarKind::T, "t"},
    {VarKind::TCheck, "tcheck"}, {VarKind::Z, "z"}, {VarKind::Hbar, "hbar"},
};

std::size_t arity(VarKind k)
{
    switch (k) {
    case VarKind::QOrbit:
    case VarKind::POrbit:
    case VarKind::T:
    case VarKind::TCheck: return 2;
    case VarKind::Z: return 1;
    case VarKind::Hbar: return 0;
    }
    return 0;
}

} // namespace

std::string_view kind_name(VarKind k)
{
    for (auto [kind, name] : kNames)
        if (kind == k) return name;
    return "?";
}

std::optional<VarKind> kind_from_name(std::string_view name)
{
    for (auto [kind, n] : kNames)
        if (n == name) return kind;
    return std::nullopt;
}

std::shared_ptr<const VariableTable> VariableTable::declare(std::vector<VariableSpec> specs, int half_dim)
{
    std::shared_ptr<VariableTable> t(new VariableTable);
    t->m_ = half_dim;
    std::map<std::pair<int, int>, VarId> q_of;

    for (VarId v = 0; v < specs.size(); ++v) {
        const auto& s = specs[v];
        if (s.id.empty()) throw InvalidInput("variable with empty id");
        if (!t->by_id_.emplace(s.id, v).second) throw InvalidInput("duplicate variable id '" + s.id + "'");
        if (s.indices.size() != arity(s.kind))
            throw InvalidInput("variable '" + s.id + "': wrong number of indices for kind "
                               + std::string(kind_name(s.kind)));
        if (!t->by_kind_.emplace(std::pair{s.kind, s.indices}, v).second)
            throw InvalidInput("variable '" + s.id + "': kind and indices already declared");
        switch (s.kind) {
        case VarKind::QOrbit:
        case VarKind::POrbit:
            if (s.multiplicity < 1) throw InvalidInput("variable '" + s.id + "': nonpositive multiplicity");
            if (s.indices[1] < 1) throw InvalidInput("variable '" + s.id + "': cover index must be positive");
            if (s.kind == VarKind::QOrbit) q_of.emplace(std::pair{s.indices[0], s.indices[1]}, v);
            break;
        case VarKind::T:
        case VarKind::TCheck:
            if (s.indices[0] < 0 || s.indices[1] < 0)
                throw InvalidInput("variable '" + s.id + "': negative form or level index");
            break;
        case VarKind::Z: break;
        case VarKind::Hbar:
            if (t->hbar_) throw InvalidInput("more than one hbar variable");
            if (s.degree != hbar_degree(half_dim))
                throw InvalidInput("hbar degree " + std::to_string(s.degree) + " differs from 2(m-3) = "
                                   + std::to_string(hbar_degree(half_dim)));
            t->hbar_ = v;
            break;
        }
    }
    for (VarId v = 0; v < specs.size(); ++v) {
        const auto& s = specs[v];
        if (s.kind != VarKind::POrbit) continue;
        auto it = q_of.find({s.indices[0], s.indices[1]});
        if (it == q_of.end()) throw InvalidInput("p-variable '" + s.id + "' has no matching q-variable");
        const auto& q = specs[it->second];
        if (q.multiplicity != s.multiplicity)
            throw InvalidInput("p-variable '" + s.id + "' and its q-partner differ in multiplicity");
        if (q.degree + s.degree != hbar_degree(half_dim))
            throw InvalidInput("degrees of '" + s.id + "' and '" + q.id + "' do not sum to 2(m-3)");
        t->partner_[v] = it->second;
        t->p_vars_.push_back(v);
    }
    t->vars_ = std::move(specs);
    return t;
}

std::optional<VarId> VariableTable::find(std::string_view id) const
{
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

VarId VariableTable::at(std::string_view id) const
{
    if (auto v = find(id)) return *v;
    throw UnknownVariable(std::string(id));
}

std::optional<VarId> VariableTable::find(VarKind kind, const std::vector<int>& indices) const
{
    auto it = by_kind_.find({kind, indices});
    if (it == by_kind_.end()) return std::nullopt;
    return it->second;
}

} // namespace sftrec
