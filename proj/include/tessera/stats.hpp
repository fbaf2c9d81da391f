#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tessera {

// Skewness/kurtosis estimator family. The sample form applies the usual
// small-sample bias corrections; the population form uses plain central
// moments. Standard deviation is always the sample (n-1) form.
enum class MomentEstimator { sample, population };

// Quantile interpolation convention. `inclusive` interpolates between order
// statistics at position q*(n-1); `exclusive` uses q*(n+1)-1 clamped to the
// data range. Both are linear-interpolation rules; `inclusive` is the
// default.
enum class QuartileRule { inclusive, exclusive };

/// Descriptive summary of one numeric sample. Fields that need more data
/// than was supplied (or a positive spread) stay unset instead of being
/// fabricated.
struct StatsSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    std::optional<double> stddev;          // sample std, needs n >= 2
    std::optional<double> mean_std_ratio;  // mean / stddev, needs stddev > 0
    std::optional<double> skewness;        // needs n >= 3 and spread > 0
    std::optional<double> kurtosis;        // excess form, needs n >= 4 and spread > 0
};

/// Linear-interpolation quantile of an ascending-sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double q,
                              QuartileRule rule = QuartileRule::inclusive) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile level outside [0,1]");
    const auto n = sorted.size();
    double pos = 0.0;
    switch (rule) {
        case QuartileRule::inclusive: pos = q * static_cast<double>(n - 1); break;
        case QuartileRule::exclusive:
            pos = q * static_cast<double>(n + 1) - 1.0;
            pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
            break;
    }
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// Computes mean, spread, quartiles and shape moments of a sample.
///
/// Sample skewness is the adjusted Fisher-Pearson coefficient and kurtosis
/// is the bias-corrected excess form (a normal sample tends to 0). Moments
/// that need more observations than given are left unset: stddev needs
/// n >= 2, skewness n >= 3, kurtosis n >= 4, and all shape moments need a
/// nonzero spread.
inline StatsSummary describe(std::span<const double> values,
                             MomentEstimator estimator = MomentEstimator::sample,
                             QuartileRule rule = QuartileRule::inclusive) {
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("describe: empty sample");

    StatsSummary s;
    s.n = n;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile_sorted(sorted, 0.25, rule);
    s.median = quantile_sorted(sorted, 0.50, rule);
    s.q3 = quantile_sorted(sorted, 0.75, rule);

    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }

    if (n < 2) return s;

    const double nd = static_cast<double>(n);
    const double var_sample = m2 / (nd - 1.0);
    const double sd = std::sqrt(var_sample);
    s.stddev = sd;
    if (sd > 0.0) s.mean_std_ratio = s.mean / sd;
    if (m2 <= 0.0) return s;  // zero spread: no shape moments

    if (estimator == MomentEstimator::sample) {
        if (n >= 3) {
            const double g = nd / ((nd - 1.0) * (nd - 2.0));
            s.skewness = g * m3 / (sd * sd * sd);
        }
        if (n >= 4) {
            const double a = nd * (nd + 1.0) / ((nd - 1.0) * (nd - 2.0) * (nd - 3.0));
            const double b = 3.0 * (nd - 1.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
            s.kurtosis = a * m4 / (var_sample * var_sample) - b;
        }
    } else {
        const double var_pop = m2 / nd;
        if (n >= 3) s.skewness = (m3 / nd) / std::pow(var_pop, 1.5);
        if (n >= 4) s.kurtosis = (m4 / nd) / (var_pop * var_pop) - 3.0;
    }
    return s;
}

inline StatsSummary describe(const std::vector<double>& values,
                             MomentEstimator estimator = MomentEstimator::sample,
                             QuartileRule rule = QuartileRule::inclusive) {
    return describe(std::span<const double>(values), estimator, rule);
}

} // namespace tessera
