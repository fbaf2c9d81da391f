#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tessera/clustering.hpp"
#include "tessera/dataset.hpp"
#include "tessera/error.hpp"
#include "tessera/stats.hpp"

namespace tessera {

/// Joint frequency table of two clusterings over the same entities, with
/// margins. Row totals equal the first clustering's cardinalities, column
/// totals the second's, and the grand total the entity count.
struct CrossTab {
    std::size_t rows = 0;  // cells of the first clustering
    std::size_t cols = 0;  // cells of the second clustering
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::size_t> row_totals;
    std::vector<std::size_t> col_totals;
    std::size_t grand_total = 0;
};

inline CrossTab crosstab(const ClusterAssignment& a, const ClusterAssignment& b) {
    if (a.entities.size() != b.entities.size())
        throw DataError("crosstab: clusterings cover different entity counts");
    std::map<std::string, int> b_cell;
    for (std::size_t i = 0; i < b.entities.size(); ++i) {
        if (!b_cell.emplace(b.entities[i], b.cells[i]).second)
            throw DataError("crosstab: duplicate entity '" + b.entities[i] + "'");
    }

    CrossTab ct;
    ct.rows = static_cast<std::size_t>(a.cell_count);
    ct.cols = static_cast<std::size_t>(b.cell_count);
    ct.counts.assign(ct.rows, std::vector<std::size_t>(ct.cols, 0));
    for (std::size_t i = 0; i < a.entities.size(); ++i) {
        const auto it = b_cell.find(a.entities[i]);
        if (it == b_cell.end())
            throw DataError("crosstab: entity '" + a.entities[i] +
                            "' is missing from the second clustering");
        ct.counts[static_cast<std::size_t>(a.cells[i] - 1)]
                 [static_cast<std::size_t>(it->second - 1)]++;
    }
    ct.row_totals.assign(ct.rows, 0);
    ct.col_totals.assign(ct.cols, 0);
    for (std::size_t r = 0; r < ct.rows; ++r) {
        for (std::size_t c = 0; c < ct.cols; ++c) {
            ct.row_totals[r] += ct.counts[r][c];
            ct.col_totals[c] += ct.counts[r][c];
            ct.grand_total += ct.counts[r][c];
        }
    }
    return ct;
}

/// Per-cluster descriptive statistics over raw (pre-normalization) values.
struct ClusterProfile {
    int cell = 0;  // 1-based
    std::size_t size = 0;
    std::vector<std::pair<std::string, StatsSummary>> variable_stats;  // empty when size == 0
};

/// Describes each cluster's members variable by variable. Empty clusters
/// yield profiles with no statistics rather than errors; singleton clusters
/// get means but no spread.
inline std::vector<ClusterProfile> profile_clusters(const ClusterAssignment& assignment,
                                                    const std::vector<AveragedRecord>& records,
                                                    const std::vector<std::string>& variables) {
    std::map<std::string, const AveragedRecord*> by_entity;
    for (const auto& rec : records) by_entity[rec.entity] = &rec;

    std::vector<std::vector<const AveragedRecord*>> members(
        static_cast<std::size_t>(assignment.cell_count));
    for (std::size_t i = 0; i < assignment.entities.size(); ++i) {
        const auto it = by_entity.find(assignment.entities[i]);
        if (it == by_entity.end())
            throw DataError("profile: no record for entity '" + assignment.entities[i] + "'");
        members[static_cast<std::size_t>(assignment.cells[i] - 1)].push_back(it->second);
    }

    std::vector<ClusterProfile> profiles;
    profiles.reserve(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
        ClusterProfile p;
        p.cell = static_cast<int>(c) + 1;
        p.size = members[c].size();
        if (p.size > 0) {
            for (const auto& var : variables) {
                std::vector<double> col;
                col.reserve(members[c].size());
                for (const auto* rec : members[c]) col.push_back(rec->at(var));
                p.variable_stats.emplace_back(var, describe(col));
            }
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

} // namespace tessera
