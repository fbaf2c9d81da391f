#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "tessera/normalize.hpp"

#include "support/oracles.hpp"

using namespace tessera;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<AveragedRecord> records_from(const std::string& var,
                                         const std::vector<double>& values) {
    std::vector<AveragedRecord> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out.push_back({"e" + std::to_string(i), {{var, values[i]}}});
    return out;
}

} // namespace

TEST_CASE("linear case: {5, 10, 15} -> {0, 0.5, 1}") {
    const auto m = minmax_normalize(records_from("x", {5, 10, 15}), {"x"});
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(1, 0) == 0.5);
    CHECK(m.at(2, 0) == 1.0);
    CHECK(m.range(0).min == 5.0);
    CHECK(m.range(0).max == 15.0);
}

TEST_CASE("constant variable raises DegenerateRangeError naming it") {
    try {
        minmax_normalize(records_from("TTA", {3, 3, 3}), {"TTA"});
        FAIL("expected DegenerateRangeError");
    } catch (const DegenerateRangeError& e) {
        CHECK(e.variable() == "TTA");
    }
}

TEST_CASE("fewer than two entities is an error") {
    CHECK_THROWS_AS(minmax_normalize(records_from("x", {1.0}), {"x"}), DataError);
}

TEST_CASE("matches the direct formula on a random vector") {
    std::mt19937_64 rng(321);
    std::uniform_real_distribution<double> unif(-50.0, 200.0);
    std::vector<double> values(20);
    for (auto& v : values) v = unif(rng);
    const auto m = minmax_normalize(records_from("x", values), {"x"});
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i)
        CHECK(m.at(i, 0) == oracle::minmax_scale(values[i], lo, hi));
}

TEST_CASE("idempotent on a [0,1]-spanning variable") {
    const std::vector<double> values{0.0, 0.25, 0.7, 1.0};
    const auto m = minmax_normalize(records_from("x", values), {"x"});
    for (std::size_t i = 0; i < values.size(); ++i) CHECK(m.at(i, 0) == values[i]);
}

TEST_CASE("affine invariance and rank preservation") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> values(15);
        for (auto& v : values) v = unif(rng) * 10.0;
        const double a = 0.001 + unif(rng) * 100.0;
        const double b = (unif(rng) - 0.5) * 200.0;
        std::vector<double> transformed(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) transformed[i] = a * values[i] + b;

        const auto m1 = minmax_normalize(records_from("x", values), {"x"});
        const auto m2 = minmax_normalize(records_from("x", transformed), {"x"});
        for (std::size_t i = 0; i < values.size(); ++i)
            CHECK_THAT(m2.at(i, 0), WithinAbs(m1.at(i, 0), 1e-9));
        // ordering of entities within the variable never changes
        for (std::size_t i = 0; i < values.size(); ++i)
            for (std::size_t j = 0; j < values.size(); ++j)
                if (values[i] < values[j]) CHECK(m1.at(i, 0) <= m1.at(j, 0));
    }
}

TEST_CASE("endpoints are attained exactly") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> values(8);
        for (auto& v : values) v = unif(rng) * 1000.0 - 300.0;
        const auto m = minmax_normalize(records_from("x", values), {"x"});
        bool has_zero = false, has_one = false;
        for (std::size_t i = 0; i < values.size(); ++i) {
            has_zero = has_zero || m.at(i, 0) == 0.0;
            has_one = has_one || m.at(i, 0) == 1.0;
        }
        CHECK(has_zero);
        CHECK(has_one);
    }
}

TEST_CASE("normalize_with_ranges keeps an external scale") {
    const auto records = records_from("x", {2.0, 4.0});
    const auto m = normalize_with_ranges(records, {"x"}, {{0.0, 8.0}});
    CHECK(m.at(0, 0) == 0.25);
    CHECK(m.at(1, 0) == 0.5);
    CHECK_THROWS_AS(normalize_with_ranges(records, {"x"}, {{3.0, 3.0}}), DegenerateRangeError);
}

TEST_CASE("matrix construction validates its shape and domain") {
    CHECK_THROWS_AS(NormalizedMatrix({"a"}, {"x"}, {1.5}, {{0.0, 1.0}}), DataError);
    CHECK_THROWS_AS(NormalizedMatrix({"a"}, {"x"}, {0.5, 0.5}, {{0.0, 1.0}}), DataError);
    CHECK_NOTHROW(NormalizedMatrix({"a"}, {"x"}, {1.0}, {{0.0, 1.0}}));
}
