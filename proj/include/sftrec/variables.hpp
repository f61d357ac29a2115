#pragma once

#include <sftrec/errors.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sftrec {

using VarId = std::uint32_t;

enum class VarKind { QOrbit, POrbit, T, TCheck, Z, Hbar };

std::string_view kind_name(VarKind k);
std::optional<VarKind> kind_from_name(std::string_view name);

// indices: (orbit, cover) for q/p, (class, level) for t/ť, (class) for z, () for ħ.
struct VariableSpec {
    std::string id;
    VarKind kind = VarKind::T;
    std::vector<int> indices;
    int degree = 0;
    int multiplicity = 1;
};

// Degree formulas for a target of half-dimension m.
constexpr int q_degree(int m, int cz) { return m - 3 + cz; }
constexpr int p_degree(int m, int cz) { return m - 3 - cz; }
constexpr int t_degree(int level, int form_degree) { return 2 * (1 - level) - form_degree; }
constexpr int z_degree(int chern) { return -2 * chern; }
constexpr int hbar_degree(int m) { return 2 * (m - 3); }

class VariableTable
{
public:
    // Validates and freezes the declaration list; declaration position is the canonical order.
    static std::shared_ptr<const VariableTable> declare(std::vector<VariableSpec> specs, int half_dim);

    std::size_t size() const { return vars_.size(); }
    const VariableSpec& operator[](VarId v) const { return vars_.at(v); }
    int half_dim() const { return m_; }

    int degree(VarId v) const { return vars_[v].degree; }
    bool odd(VarId v) const { return (vars_[v].degree & 1) != 0; }
    VarKind kind(VarId v) const { return vars_[v].kind; }
    bool is_t_like(VarId v) const { return kind(v) == VarKind::T || kind(v) == VarKind::TCheck; }
    bool is_orbit(VarId v) const { return kind(v) == VarKind::QOrbit || kind(v) == VarKind::POrbit; }
    // Cover multiplicity index for q/p variables, 0 otherwise.
    int cover(VarId v) const { return is_orbit(v) ? vars_[v].indices[1] : 0; }

    std::optional<VarId> find(std::string_view id) const;
    VarId at(std::string_view id) const;
    std::optional<VarId> find(VarKind kind, const std::vector<int>& indices) const;

    // Matching q-variable of a p-variable.
    VarId partner(VarId p) const { return partner_.at(p); }
    const std::vector<VarId>& p_variables() const { return p_vars_; }
    std::optional<VarId> hbar() const { return hbar_; }

private:
    VariableTable() = default;

    std::vector<VariableSpec> vars_;
    std::unordered_map<std::string, VarId> by_id_;
    std::map<std::pair<VarKind, std::vector<int>>, VarId> by_kind_;
    std::unordered_map<VarId, VarId> partner_;
    std::vector<VarId> p_vars_;
    std::optional<VarId> hbar_;
    int m_ = 0;
};

using TablePtr = std::shared_ptr<const VariableTable>;

} // namespace sftrec
