#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tessera/dataset.hpp"
#include "tessera/error.hpp"

namespace tessera {

/// Entity-by-variable matrix with every value in [0,1], carrying the source
/// (min, max) pair each variable was scaled with.
class NormalizedMatrix {
public:
    struct Range {
        double min = 0.0;
        double max = 1.0;
        friend bool operator==(const Range&, const Range&) = default;
    };

    NormalizedMatrix(std::vector<std::string> entities, std::vector<std::string> variables,
                     std::vector<double> values, std::vector<Range> ranges)
        : entities_(std::move(entities)),
          variables_(std::move(variables)),
          values_(std::move(values)),
          ranges_(std::move(ranges)) {
        if (values_.size() != entities_.size() * variables_.size())
            throw DataError("normalized matrix shape mismatch");
        if (ranges_.size() != variables_.size())
            throw DataError("normalized matrix needs one (min,max) pair per variable");
        for (double v : values_)
            if (!(v >= 0.0 && v <= 1.0))
                throw DataError("normalized value outside [0,1]");
    }

    const std::vector<std::string>& entities() const noexcept { return entities_; }
    const std::vector<std::string>& variables() const noexcept { return variables_; }
    std::size_t entity_count() const noexcept { return entities_.size(); }
    std::size_t variable_count() const noexcept { return variables_.size(); }

    double at(std::size_t entity, std::size_t variable) const {
        return values_.at(entity * variables_.size() + variable);
    }

    std::span<const double> row(std::size_t entity) const {
        return {values_.data() + entity * variables_.size(), variables_.size()};
    }

    const Range& range(std::size_t variable) const { return ranges_.at(variable); }
    const std::vector<Range>& ranges() const noexcept { return ranges_; }

    std::optional<std::size_t> variable_index(const std::string& name) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i] == name) return i;
        return std::nullopt;
    }

    friend bool operator==(const NormalizedMatrix&, const NormalizedMatrix&) = default;

private:
    std::vector<std::string> entities_;
    std::vector<std::string> variables_;
    std::vector<double> values_;  // row-major [entity][variable]
    std::vector<Range> ranges_;
};

/// Scales each variable onto [0,1] by its sample range:
/// scaled = (x - min) / (max - min). The entity attaining the minimum maps
/// to exactly 0 and the one attaining the maximum to exactly 1.
///
/// Throws DegenerateRangeError when a variable is constant and DataError
/// with fewer than two records.
inline NormalizedMatrix minmax_normalize(const std::vector<AveragedRecord>& records,
                                         const std::vector<std::string>& variables) {
    if (records.size() < 2)
        throw DataError("min-max normalization needs at least 2 entities, got " +
                        std::to_string(records.size()));

    std::vector<NormalizedMatrix::Range> ranges;
    ranges.reserve(variables.size());
    for (const auto& var : variables) {
        double lo = records.front().at(var);
        double hi = lo;
        for (const auto& rec : records) {
            const double v = rec.at(var);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) throw DegenerateRangeError(var);
        ranges.push_back({lo, hi});
    }

    std::vector<std::string> entities;
    entities.reserve(records.size());
    std::vector<double> values;
    values.reserve(records.size() * variables.size());
    for (const auto& rec : records) {
        entities.push_back(rec.entity);
        for (std::size_t v = 0; v < variables.size(); ++v) {
            const auto& r = ranges[v];
            values.push_back((rec.at(variables[v]) - r.min) / (r.max - r.min));
        }
    }
    return NormalizedMatrix(std::move(entities), std::vector<std::string>(variables),
                            std::move(values), std::move(ranges));
}

/// Scales with externally supplied ranges instead of the sample's own
/// extrema (used when a filtered sample should keep the full-sample scale).
/// Values must still land inside [0,1].
inline NormalizedMatrix normalize_with_ranges(const std::vector<AveragedRecord>& records,
                                              const std::vector<std::string>& variables,
                                              const std::vector<NormalizedMatrix::Range>& ranges) {
    if (ranges.size() != variables.size())
        throw DataError("normalize_with_ranges: one range per variable required");
    for (std::size_t v = 0; v < variables.size(); ++v)
        if (!(ranges[v].max > ranges[v].min)) throw DegenerateRangeError(variables[v]);

    std::vector<std::string> entities;
    std::vector<double> values;
    for (const auto& rec : records) {
        entities.push_back(rec.entity);
        for (std::size_t v = 0; v < variables.size(); ++v) {
            const auto& r = ranges[v];
            values.push_back((rec.at(variables[v]) - r.min) / (r.max - r.min));
        }
    }
    return NormalizedMatrix(std::move(entities), std::vector<std::string>(variables),
                            std::move(values), std::vector<NormalizedMatrix::Range>(ranges));
}

} // namespace tessera
