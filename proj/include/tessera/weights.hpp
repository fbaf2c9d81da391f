#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tessera {

/// Exact rational value. Weight presets that split a share further (thirds
/// into ninths and sixths) are assembled from fractions so the simplex
/// constraint can be proven in integer arithmetic, not just within epsilon.
struct Fraction {
    long long num = 0;
    long long den = 1;

    Fraction() = default;
    Fraction(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("fraction with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Fraction operator+(const Fraction& a, const Fraction& b) {
        return Fraction(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Fraction operator*(const Fraction& a, const Fraction& b) {
        return Fraction(a.num * b.num, a.den * b.den);
    }
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Nonnegative per-variable weights over an ordered variable scope.
/// Construction rejects any vector whose sum strays from 1 by more than
/// kSimplexTolerance.
class WeightScheme {
public:
    static constexpr double kSimplexTolerance = 1e-12;

    WeightScheme(std::vector<std::string> variables, std::vector<double> weights)
        : variables_(std::move(variables)), weights_(std::move(weights)) {
        if (variables_.empty())
            throw std::invalid_argument("weight scheme needs at least one variable");
        if (variables_.size() != weights_.size())
            throw std::invalid_argument("weight scheme: one weight per variable required");
        double sum = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
            sum += w;
        }
        if (std::fabs(sum - 1.0) > kSimplexTolerance)
            throw std::invalid_argument("weights must sum to 1 (got " + std::to_string(sum) + ")");
    }

    /// Equal weight 1/n for every variable in scope.
    static WeightScheme uniform(std::vector<std::string> variables) {
        if (variables.empty())
            throw std::invalid_argument("weight scheme needs at least one variable");
        const std::size_t n = variables.size();
        return WeightScheme(std::move(variables),
                            std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    /// Weight 1 on `target`, 0 on every other variable in scope.
    static WeightScheme one_hot(std::vector<std::string> variables, const std::string& target) {
        std::vector<double> w(variables.size(), 0.0);
        bool found = false;
        for (std::size_t i = 0; i < variables.size(); ++i) {
            if (variables[i] == target) {
                w[i] = 1.0;
                found = true;
            }
        }
        if (!found)
            throw std::invalid_argument("one-hot target '" + target + "' is not in scope");
        return WeightScheme(std::move(variables), std::move(w));
    }

    /// Builds a scheme from exact fractions; their rational sum must equal
    /// 1 exactly.
    static WeightScheme from_fractions(std::vector<std::string> variables,
                                       const std::vector<Fraction>& fractions) {
        if (variables.size() != fractions.size())
            throw std::invalid_argument("one fraction per variable required");
        Fraction sum(0, 1);
        for (const auto& f : fractions) sum = sum + f;
        if (!(sum == Fraction(1, 1)))
            throw std::invalid_argument("fractional weights must sum to exactly 1");
        std::vector<double> w;
        w.reserve(fractions.size());
        for (const auto& f : fractions) w.push_back(f.to_double());
        return WeightScheme(std::move(variables), std::move(w));
    }

    const std::vector<std::string>& variables() const noexcept { return variables_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return variables_.size(); }

    double weight_of(const std::string& variable) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i] == variable) return weights_[i];
        throw std::invalid_argument("variable '" + variable + "' is out of scope");
    }

private:
    std::vector<std::string> variables_;
    std::vector<double> weights_;
};

} // namespace tessera
