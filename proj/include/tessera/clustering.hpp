#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tessera/error.hpp"
#include "tessera/normalize.hpp"
#include "tessera/parallel.hpp"
#include "tessera/variables.hpp"
#include "tessera/weights.hpp"

namespace tessera {

/// Fixed reference points on the main diagonal of the unit hypercube.
/// Strictly increasing, all inside the open interval (0,1). Cells are not
/// refitted: this is fixed-centroid assignment, not k-means.
class CentroidSet {
public:
    explicit CentroidSet(std::vector<double> centroids) : centroids_(std::move(centroids)) {
        if (centroids_.empty()) throw std::invalid_argument("centroid set must not be empty");
        for (std::size_t i = 0; i < centroids_.size(); ++i) {
            if (!(centroids_[i] > 0.0 && centroids_[i] < 1.0))
                throw std::invalid_argument("centroids must lie strictly inside (0,1)");
            if (i > 0 && !(centroids_[i] > centroids_[i - 1]))
                throw std::invalid_argument("centroids must be strictly increasing");
        }
    }

    /// The shipped default: four equally spaced centroids {0.2, 0.4, 0.6, 0.8}.
    static CentroidSet default_set() { return CentroidSet({0.2, 0.4, 0.6, 0.8}); }

    const std::vector<double>& values() const noexcept { return centroids_; }
    std::size_t size() const noexcept { return centroids_.size(); }
    double operator[](std::size_t i) const { return centroids_.at(i); }

    friend bool operator==(const CentroidSet&, const CentroidSet&) = default;

private:
    std::vector<double> centroids_;
};

/// Entity -> cell partition. Every entity lands in exactly one cell
/// (1-based); entities whose minimum distance was attained by two or more
/// centroids are assigned to the lowest-index minimizer and flagged.
struct ClusterAssignment {
    std::vector<std::string> entities;
    std::vector<int> cells;       // 1-based cell index, aligned with entities
    std::vector<bool> tie_flags;  // aligned with entities
    int cell_count = 0;
    std::vector<std::size_t> cardinalities;  // per cell, sums to entities.size()

    std::size_t tie_count() const {
        std::size_t n = 0;
        for (bool t : tie_flags) n += t ? 1 : 0;
        return n;
    }
};

/// Weighted squared-Euclidean distance between a normalized point and a
/// scalar centroid: sum_x w_x * (x - c)^2. With values and centroid in
/// [0,1] and weights on the simplex the result stays in [0,1]; the return
/// value is pinned to that interval against rounding.
inline double weighted_distance(std::span<const double> point, double centroid,
                                const WeightScheme& scheme) {
    if (point.size() != scheme.size())
        throw std::invalid_argument("point/scheme dimension mismatch");
    if (!(centroid > 0.0 && centroid < 1.0))
        throw std::invalid_argument("centroid must lie strictly inside (0,1)");
    double d = 0.0;
    const auto& w = scheme.weights();
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (!(point[i] >= 0.0 && point[i] <= 1.0))
            throw std::invalid_argument("point component outside [0,1]");
        const double diff = point[i] - centroid;
        d += w[i] * diff * diff;
    }
    return std::clamp(d, 0.0, 1.0);
}

/// Assigns every entity to its nearest centroid under the scheme's weighted
/// distance. A tie is a minimum attained by more than one centroid, detected
/// with |d - d_min| <= tie_epsilon (exact equality by default); tied
/// entities go to the lowest-index minimizer and are flagged.
inline ClusterAssignment assign_cells(const NormalizedMatrix& matrix,
                                      const CentroidSet& centroids,
                                      const WeightScheme& scheme, double tie_epsilon = 0.0,
                                      unsigned workers = 1) {
    if (tie_epsilon < 0.0) throw std::invalid_argument("tie epsilon must be >= 0");

    // Resolve scheme variables against matrix columns once.
    std::vector<std::size_t> cols;
    cols.reserve(scheme.size());
    for (const auto& var : scheme.variables()) {
        const auto idx = matrix.variable_index(var);
        if (!idx)
            throw std::invalid_argument("scheme variable '" + var + "' is not in the matrix");
        cols.push_back(*idx);
    }

    const std::size_t n = matrix.entity_count();
    const std::size_t h = centroids.size();
    ClusterAssignment out;
    out.entities = matrix.entities();
    out.cells.resize(n);
    out.tie_flags.assign(n, false);
    out.cell_count = static_cast<int>(h);
    out.cardinalities.assign(h, 0);

    std::vector<double> point(scheme.size());
    auto one_entity = [&](std::vector<double>& pt, std::size_t e) {
        const auto row = matrix.row(e);
        for (std::size_t i = 0; i < cols.size(); ++i) pt[i] = row[cols[i]];
        std::size_t best = 0;
        double best_d = weighted_distance(pt, centroids[0], scheme);
        std::vector<double> dist(h);
        dist[0] = best_d;
        for (std::size_t k = 1; k < h; ++k) {
            dist[k] = weighted_distance(pt, centroids[k], scheme);
            if (dist[k] < best_d) {
                best_d = dist[k];
                best = k;
            }
        }
        std::size_t minimizers = 0;
        for (std::size_t k = 0; k < h; ++k)
            if (dist[k] - best_d <= tie_epsilon) ++minimizers;
        out.cells[e] = static_cast<int>(best) + 1;
        out.tie_flags[e] = minimizers > 1;
    };

    if (workers <= 1) {
        for (std::size_t e = 0; e < n; ++e) one_entity(point, e);
    } else {
        parallel_for(n, workers, [&](std::size_t e) {
            std::vector<double> pt(scheme.size());
            one_entity(pt, e);
        });
    }
    for (std::size_t e = 0; e < n; ++e)
        out.cardinalities[static_cast<std::size_t>(out.cells[e] - 1)]++;
    return out;
}

/// Weighting scenario. `one_hot` explores each variable on its own (one
/// assignment per variable); `uniform_value` weights every variable in a
/// set equally; `uniform_role` splits weight equally across the performance
/// macro-groups first, then uniformly inside each group.
enum class ScenarioId { one_hot, uniform_value, uniform_role, custom };

inline const char* to_string(ScenarioId id) {
    switch (id) {
        case ScenarioId::one_hot:       return "I";
        case ScenarioId::uniform_value: return "II";
        case ScenarioId::uniform_role:  return "III";
        case ScenarioId::custom:        return "custom";
    }
    return "?";
}

inline ScenarioId scenario_from_string(const std::string& s) {
    if (s == "I" || s == "i" || s == "1") return ScenarioId::one_hot;
    if (s == "II" || s == "ii" || s == "2") return ScenarioId::uniform_value;
    if (s == "III" || s == "iii" || s == "3") return ScenarioId::uniform_role;
    if (s == "custom") return ScenarioId::custom;
    throw ConfigError("unknown scenario '" + s + "' (expected I, II, III or custom)");
}

/// Per-role weights for the performance set: each macro-group (growth,
/// profitability, productivity) gets an equal share, split uniformly inside
/// the group. Assembled from exact fractions.
inline WeightScheme role_uniform_performance(const VariableRegistry& registry) {
    const auto vars = registry.performance_names();
    if (vars.empty()) throw std::invalid_argument("registry has no performance variables");

    std::vector<VarGroup> groups;
    std::vector<long long> group_size;
    for (const auto& name : vars) {
        const auto g = registry.find(name)->group;
        if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    }
    for (const auto g : groups) {
        long long c = 0;
        for (const auto& name : vars)
            if (registry.find(name)->group == g) ++c;
        group_size.push_back(c);
    }

    std::vector<Fraction> fractions;
    fractions.reserve(vars.size());
    for (const auto& name : vars) {
        const auto g = registry.find(name)->group;
        const auto gi = static_cast<std::size_t>(
            std::find(groups.begin(), groups.end(), g) - groups.begin());
        fractions.emplace_back(1, static_cast<long long>(groups.size()) * group_size[gi]);
    }
    return WeightScheme::from_fractions(vars, fractions);
}

struct ScenarioConfig {
    ScenarioId id = ScenarioId::uniform_value;
    CentroidSet innovation_centroids = CentroidSet::default_set();
    CentroidSet performance_centroids = CentroidSet::default_set();
    // Unset for scenario I, which expands into one-hot schemes per variable.
    std::optional<WeightScheme> innovation_scheme;
    std::optional<WeightScheme> performance_scheme;
    double tie_epsilon = 0.0;

    static ScenarioConfig preset(ScenarioId id,
                                 const VariableRegistry& registry = VariableRegistry::standard()) {
        ScenarioConfig cfg;
        cfg.id = id;
        switch (id) {
            case ScenarioId::one_hot:
                break;
            case ScenarioId::uniform_value:
                cfg.innovation_scheme = WeightScheme::uniform(registry.innovation_names());
                cfg.performance_scheme = WeightScheme::uniform(registry.performance_names());
                break;
            case ScenarioId::uniform_role:
                cfg.innovation_scheme = WeightScheme::uniform(registry.innovation_names());
                cfg.performance_scheme = role_uniform_performance(registry);
                break;
            case ScenarioId::custom:
                throw ConfigError("custom scenarios need explicit weight schemes");
        }
        return cfg;
    }
};

struct LabeledAssignment {
    std::string label;
    ClusterAssignment assignment;
};

struct ScenarioResult {
    std::vector<LabeledAssignment> innovation;
    std::vector<LabeledAssignment> performance;
};

/// Runs the configured clustering over both variable sets. Scenario I
/// yields one assignment per variable (labelled by variable name); the
/// other scenarios yield a single assignment per set.
inline ScenarioResult run_scenario(const NormalizedMatrix& innovation,
                                   const NormalizedMatrix& performance,
                                   const ScenarioConfig& config, unsigned workers = 1) {
    if (innovation.entities() != performance.entities())
        throw DataError("innovation and performance matrices cover different entities");

    ScenarioResult result;
    if (config.id == ScenarioId::one_hot) {
        for (const auto& var : innovation.variables())
            result.innovation.push_back(
                {var, assign_cells(innovation, config.innovation_centroids,
                                   WeightScheme::one_hot(innovation.variables(), var),
                                   config.tie_epsilon, workers)});
        for (const auto& var : performance.variables())
            result.performance.push_back(
                {var, assign_cells(performance, config.performance_centroids,
                                   WeightScheme::one_hot(performance.variables(), var),
                                   config.tie_epsilon, workers)});
        return result;
    }

    if (!config.innovation_scheme || !config.performance_scheme)
        throw ConfigError("scenario " + std::string(to_string(config.id)) +
                          " needs weight schemes for both variable sets");
    result.innovation.push_back(
        {"innovation", assign_cells(innovation, config.innovation_centroids,
                                    *config.innovation_scheme, config.tie_epsilon, workers)});
    result.performance.push_back(
        {"performance", assign_cells(performance, config.performance_centroids,
                                     *config.performance_scheme, config.tie_epsilon, workers)});
    return result;
}

} // namespace tessera
