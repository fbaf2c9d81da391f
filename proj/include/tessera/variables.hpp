#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tessera/error.hpp"

namespace tessera {

// Macro-perspective a variable belongs to. Growth, profitability and
// productivity together form the performance set; innovation stands alone.
enum class VarGroup { innovation, growth, profitability, productivity };

constexpr bool is_performance(VarGroup g) noexcept {
    return g != VarGroup::innovation;
}

inline const char* to_string(VarGroup g) {
    switch (g) {
        case VarGroup::innovation:    return "innovation";
        case VarGroup::growth:        return "growth";
        case VarGroup::profitability: return "profitability";
        case VarGroup::productivity:  return "productivity";
    }
    return "?";
}

inline VarGroup var_group_from_string(const std::string& s) {
    if (s == "innovation")    return VarGroup::innovation;
    if (s == "growth")        return VarGroup::growth;
    if (s == "profitability") return VarGroup::profitability;
    if (s == "productivity")  return VarGroup::productivity;
    throw ConfigError("unknown variable group '" + s + "'");
}

struct Variable {
    std::string name;
    VarGroup group;
};

/// Ordered collection of the variables a study tracks. The order is the
/// canonical column order used by matrices, reports and weight presets.
class VariableRegistry {
public:
    VariableRegistry() = default;

    explicit VariableRegistry(std::vector<Variable> vars) : vars_(std::move(vars)) {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i].name.empty())
                throw ConfigError("registry variable name must not be empty");
            auto [it, inserted] = index_.emplace(vars_[i].name, i);
            (void)it;
            if (!inserted)
                throw ConfigError("duplicate registry variable '" + vars_[i].name + "'");
        }
    }

    /// The nine shipped variables: two innovation stocks, three growth
    /// variations, two profitability ratios and two productivity ratios.
    static const VariableRegistry& standard() {
        static const VariableRegistry reg{{
            {"TIAX", VarGroup::innovation},
            {"TTA", VarGroup::innovation},
            {"DSal", VarGroup::growth},
            {"DAss", VarGroup::growth},
            {"DLab", VarGroup::growth},
            {"ROI", VarGroup::profitability},
            {"ROS", VarGroup::profitability},
            {"ATO", VarGroup::productivity},
            {"S/E", VarGroup::productivity},
        }};
        return reg;
    }

    std::size_t size() const noexcept { return vars_.size(); }
    const Variable& operator[](std::size_t i) const { return vars_.at(i); }
    auto begin() const { return vars_.begin(); }
    auto end() const { return vars_.end(); }

    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    const Variable* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &vars_[it->second];
    }

    std::optional<std::size_t> index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(vars_.size());
        for (const auto& v : vars_) out.push_back(v.name);
        return out;
    }

    std::vector<std::string> names(VarGroup g) const {
        std::vector<std::string> out;
        for (const auto& v : vars_)
            if (v.group == g) out.push_back(v.name);
        return out;
    }

    std::vector<std::string> innovation_names() const { return names(VarGroup::innovation); }

    std::vector<std::string> performance_names() const {
        std::vector<std::string> out;
        for (const auto& v : vars_)
            if (is_performance(v.group)) out.push_back(v.name);
        return out;
    }

private:
    std::vector<Variable> vars_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace tessera
