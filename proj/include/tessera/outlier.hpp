#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tessera/clustering.hpp"
#include "tessera/dataset.hpp"
#include "tessera/error.hpp"
#include "tessera/normalize.hpp"
#include "tessera/stats.hpp"
#include "tessera/variables.hpp"

namespace tessera {

/// Iterative outlier removal policy. An entity's extremeness is its largest
/// per-variable robust deviation |value - median| / IQR; removal continues
/// while that deviation exceeds `deviation_threshold` or while any one-hot
/// clustering crams more than `collapse_share` of the entities into the
/// first cell. `max_removal_fraction` is the runaway guard.
struct FilterPolicy {
    double deviation_threshold = 3.5;
    double collapse_share = 0.9;
    double max_removal_fraction = 0.25;
    CentroidSet centroids = CentroidSet::default_set();
};

struct OutlierRemoval {
    std::string entity;
    int iteration = 0;        // 1-based removal round
    std::string variable;     // variable attaining the max robust deviation
    double deviation = 0.0;
    std::string trigger;      // "collapse" or "deviation"
};

struct FilterResult {
    std::vector<AveragedRecord> retained;  // input order preserved
    std::vector<OutlierRemoval> removed;   // in removal order
};

namespace detail {

// |value - median| / IQR. A zero IQR makes any off-median value infinitely
// extreme and on-median values unremarkable.
inline double robust_deviation(double value, double median, double iqr) {
    const double d = std::fabs(value - median);
    if (iqr > 0.0) return d / iqr;
    return d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

// Largest first-cell share over per-variable one-hot clusterings of the
// re-normalized sample. Variables that became constant are skipped: they
// cannot separate cells.
inline double collapse_share(const std::vector<AveragedRecord>& records,
                             const std::vector<std::string>& variables,
                             const CentroidSet& centroids) {
    double worst = 0.0;
    for (const auto& var : variables) {
        const std::vector<std::string> one{var};
        try {
            const auto m = minmax_normalize(records, one);
            const auto a = assign_cells(m, centroids, WeightScheme::one_hot(one, var));
            worst = std::max(worst, static_cast<double>(a.cardinalities.front()) /
                                        static_cast<double>(a.entities.size()));
        } catch (const DegenerateRangeError&) {
            continue;
        }
    }
    return worst;
}

} // namespace detail

/// Removes extreme entities one at a time, re-normalizing and re-clustering
/// after every removal, until neither the collapse condition nor the
/// deviation condition holds. Deterministic: candidates tie-break on entity
/// id, so the removal list is invariant under input reordering.
inline FilterResult outlier_filter(const std::vector<AveragedRecord>& records,
                                   const VariableRegistry& registry = VariableRegistry::standard(),
                                   const FilterPolicy& policy = {}) {
    if (policy.deviation_threshold <= 0.0 || policy.collapse_share <= 0.0 ||
        policy.collapse_share > 1.0 || policy.max_removal_fraction < 0.0 ||
        policy.max_removal_fraction > 1.0)
        throw ConfigError("invalid outlier filter policy");

    std::vector<std::string> variables;
    for (const auto& v : registry)
        if (!records.empty() && records.front().values.count(v.name))
            variables.push_back(v.name);

    FilterResult result;
    result.retained = records;
    const auto max_removals = static_cast<std::size_t>(
        policy.max_removal_fraction * static_cast<double>(records.size()));

    for (int iteration = 1;; ++iteration) {
        if (result.retained.size() < 3) break;  // too small to assess robustly

        // Per-variable medians and IQRs over the current sample.
        std::vector<double> medians(variables.size()), iqrs(variables.size());
        for (std::size_t v = 0; v < variables.size(); ++v) {
            std::vector<double> col;
            col.reserve(result.retained.size());
            for (const auto& rec : result.retained) col.push_back(rec.at(variables[v]));
            std::sort(col.begin(), col.end());
            medians[v] = quantile_sorted(col, 0.50);
            iqrs[v] = quantile_sorted(col, 0.75) - quantile_sorted(col, 0.25);
        }

        // Most extreme entity; ties resolved by entity id.
        std::size_t worst_idx = 0;
        std::size_t worst_var = 0;
        double worst_dev = -1.0;
        for (std::size_t e = 0; e < result.retained.size(); ++e) {
            double dev = -1.0;
            std::size_t dev_var = 0;
            for (std::size_t v = 0; v < variables.size(); ++v) {
                const double d = detail::robust_deviation(
                    result.retained[e].at(variables[v]), medians[v], iqrs[v]);
                if (d > dev) {
                    dev = d;
                    dev_var = v;
                }
            }
            const bool better =
                dev > worst_dev ||
                (dev == worst_dev &&
                 result.retained[e].entity < result.retained[worst_idx].entity);
            if (better) {
                worst_dev = dev;
                worst_var = dev_var;
                worst_idx = e;
            }
        }

        const double share =
            detail::collapse_share(result.retained, variables, policy.centroids);
        const bool collapsed = share > policy.collapse_share;
        const bool deviant = worst_dev > policy.deviation_threshold;
        if (!collapsed && !deviant) break;

        if (result.removed.size() + 1 > max_removals)
            throw NumericError(
                "outlier filter would remove more than the configured maximum fraction (" +
                std::to_string(policy.max_removal_fraction) + ") of entities");

        result.removed.push_back({result.retained[worst_idx].entity, iteration,
                                  variables[worst_var], worst_dev,
                                  collapsed ? "collapse" : "deviation"});
        result.retained.erase(result.retained.begin() +
                              static_cast<std::ptrdiff_t>(worst_idx));
    }
    return result;
}

} // namespace tessera
