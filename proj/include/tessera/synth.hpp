#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tessera/dataset.hpp"
#include "tessera/error.hpp"
#include "tessera/variables.hpp"

namespace tessera {

namespace detail {

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t h = 14695981039346656037ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 14695981039346656037ull) {
    return fnv1a64(s.data(), s.size(), h);
}

// Uniform in [0,1) built from the top 53 bits of the engine output, so the
// value stream depends only on the standardized mt19937_64 sequence.
inline double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller standard normal; fully pinned down by the engine sequence.
inline double standard_normal(std::mt19937_64& rng) {
    double u1 = uniform53(rng);
    while (u1 <= 0.0) u1 = uniform53(rng);
    const double u2 = uniform53(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace detail

/// Target moments for one synthetic variable. Bounds, when present, clip
/// the generated values (with the moments re-corrected afterwards).
struct VariableSynthSpec {
    double mean = 0.0;
    double stddev = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
};

/// Recipe for a deterministic synthetic panel. Period averages of each
/// variable hit the target mean and sample std exactly in the unbounded
/// case, and within `moment_tolerance` when bounds force clipping.
struct SynthSpec {
    std::size_t entity_count = 0;
    std::uint64_t seed = 0;
    YearWindow innovation_window{2006, 2007};
    YearWindow performance_window{2008, 2010};
    std::map<std::string, VariableSynthSpec> variables;  // keyed by registry name
    double moment_tolerance = 0.02;

    std::vector<int> years() const {
        const int first = std::min(innovation_window.first, performance_window.first);
        const int last = std::max(innovation_window.last, performance_window.last);
        std::vector<int> out;
        for (int y = first; y <= last; ++y) out.push_back(y);
        return out;
    }
};

namespace detail {

struct SynthColumn {
    std::vector<double> base;                 // per-entity window average
    std::vector<std::vector<double>> yearly;  // [entity][panel year]
};

inline void correct_moments(std::vector<double>& v, double mean, double stddev) {
    const std::size_t n = v.size();
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double s = std::sqrt(ss / static_cast<double>(n - 1));
    if (s <= 0.0)
        throw NumericError("synthetic sample collapsed to a constant; cannot match stddev");
    for (double& x : v) x = mean + (x - m) * (stddev / s);
}

inline bool moments_close(const std::vector<double>& v, const VariableSynthSpec& spec,
                          double tol) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double s = std::sqrt(ss / static_cast<double>(v.size() - 1));
    const double mean_scale = std::max({std::fabs(spec.mean), spec.stddev, 1e-12});
    return std::fabs(m - spec.mean) <= tol * mean_scale &&
           std::fabs(s - spec.stddev) <= tol * std::max(spec.stddev, 1e-12);
}

inline SynthColumn synth_column(const std::string& variable, const VariableSynthSpec& vs,
                                const SynthSpec& spec, const YearWindow& window,
                                const std::vector<int>& panel_years) {
    if (vs.stddev < 0.0)
        throw NumericError("variable '" + variable + "': stddev must be >= 0");
    if (vs.lower && vs.upper && !(*vs.lower < *vs.upper))
        throw NumericError("variable '" + variable + "': empty bounds interval");
    if ((vs.lower && vs.mean < *vs.lower) || (vs.upper && vs.mean > *vs.upper))
        throw NumericError("variable '" + variable + "': target mean outside bounds");
    if (vs.lower && vs.upper) {
        // Bhatia-Davis: a distribution on [m, M] with mean mu has variance
        // at most (M - mu)(mu - m).
        const double cap = (*vs.upper - vs.mean) * (vs.mean - *vs.lower);
        if (vs.stddev * vs.stddev > cap)
            throw NumericError("variable '" + variable +
                               "': target stddev infeasible for the given bounds");
    }

    std::mt19937_64 rng(fnv1a64(variable, fnv1a64(&spec.seed, sizeof spec.seed)));
    const std::size_t n = spec.entity_count;

    SynthColumn col;
    col.base.assign(n, vs.mean);
    if (vs.stddev > 0.0) {
        for (auto& x : col.base) x = standard_normal(rng);
        const bool bounded = vs.lower || vs.upper;
        bool ok = false;
        for (int iter = 0; iter < 200 && !ok; ++iter) {
            correct_moments(col.base, vs.mean, vs.stddev);
            if (!bounded) {
                ok = true;
                break;
            }
            for (auto& x : col.base) {
                if (vs.lower && x < *vs.lower) x = *vs.lower;
                if (vs.upper && x > *vs.upper) x = *vs.upper;
            }
            ok = moments_close(col.base, vs, spec.moment_tolerance);
        }
        if (!ok)
            throw NumericError("variable '" + variable +
                               "': bounds and target moments could not be reconciled");
    }

    // Spread each base average across the panel years. Inside the averaging
    // window the jitter sums to zero so the window mean stays exact; the
    // whole window jitter vector is shrunk if a bound would be crossed.
    const double jitter_scale = 0.05 * vs.stddev;
    col.yearly.assign(n, std::vector<double>(panel_years.size(), 0.0));
    for (std::size_t e = 0; e < n; ++e) {
        std::vector<double> wj(window.size(), 0.0);
        if (jitter_scale > 0.0 && window.size() > 1) {
            double sum = 0.0;
            for (std::size_t k = 0; k + 1 < wj.size(); ++k) {
                wj[k] = jitter_scale * standard_normal(rng);
                sum += wj[k];
            }
            wj.back() = -sum;
            double shrink = 1.0;
            for (const double j : wj) {
                const double x = col.base[e] + j;
                if (vs.upper && x > *vs.upper && j > 0.0)
                    shrink = std::min(shrink, (*vs.upper - col.base[e]) / j);
                if (vs.lower && x < *vs.lower && j < 0.0)
                    shrink = std::min(shrink, (*vs.lower - col.base[e]) / j);
            }
            if (shrink < 1.0)
                for (double& j : wj) j *= shrink;
        }
        std::size_t wk = 0;
        for (std::size_t y = 0; y < panel_years.size(); ++y) {
            if (window.contains(panel_years[y])) {
                col.yearly[e][y] = col.base[e] + wj[wk++];
            } else {
                double x = col.base[e] + (jitter_scale > 0.0
                                              ? jitter_scale * standard_normal(rng)
                                              : 0.0);
                if (vs.lower) x = std::max(x, *vs.lower);
                if (vs.upper) x = std::min(x, *vs.upper);
                col.yearly[e][y] = x;
            }
        }
    }
    return col;
}

} // namespace detail

/// Generates a deterministic synthetic panel: same spec and seed, same
/// dataset, bit for bit. Entities are named E001, E002, ... with enough
/// digits to keep lexicographic and numeric order aligned.
inline PanelDataset synth_generate(const SynthSpec& spec,
                                   const VariableRegistry& registry = VariableRegistry::standard()) {
    if (spec.entity_count < 2)
        throw NumericError("synthetic spec needs entity_count >= 2");
    if (spec.variables.empty())
        throw ConfigError("synthetic spec declares no variables");
    for (const auto& [name, vs] : spec.variables) {
        (void)vs;
        if (!registry.contains(name))
            throw ConfigError("synthetic spec references unknown variable '" + name + "'");
    }

    const auto panel_years = spec.years();
    std::vector<std::string> variables;
    for (const auto& v : registry)
        if (spec.variables.count(v.name)) variables.push_back(v.name);

    int digits = 1;
    for (std::size_t p = 10; p <= spec.entity_count; p *= 10) ++digits;
    std::vector<std::string> entities;
    entities.reserve(spec.entity_count);
    for (std::size_t e = 1; e <= spec.entity_count; ++e) {
        std::string id = std::to_string(e);
        entities.push_back("E" + std::string(static_cast<std::size_t>(digits) - id.size(), '0') +
                           id);
    }

    std::vector<std::optional<double>> cells(spec.entity_count * panel_years.size() *
                                             variables.size());
    for (std::size_t v = 0; v < variables.size(); ++v) {
        const auto& vs = spec.variables.at(variables[v]);
        const auto& window =
            is_performance(registry.find(variables[v])->group) ? spec.performance_window
                                                               : spec.innovation_window;
        const auto col = detail::synth_column(variables[v], vs, spec, window, panel_years);
        for (std::size_t e = 0; e < spec.entity_count; ++e)
            for (std::size_t y = 0; y < panel_years.size(); ++y)
                cells[(e * panel_years.size() + y) * variables.size() + v] = col.yearly[e][y];
    }
    return PanelDataset(std::move(entities), panel_years, std::move(variables),
                        std::move(cells));
}

} // namespace tessera
