#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "tessera/outlier.hpp"

using namespace tessera;

namespace {

const VariableRegistry& small_registry() {
    static const VariableRegistry reg{{
        {"TIAX", VarGroup::innovation},
        {"ROI", VarGroup::profitability},
    }};
    return reg;
}

std::vector<AveragedRecord> spread_fixture(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<AveragedRecord> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({"e" + std::to_string(i), {{"TIAX", unif(rng)}, {"ROI", unif(rng)}}});
    return out;
}

} // namespace

TEST_CASE("uniformly spread data removes nothing") {
    const auto records = spread_fixture(30, 1);
    const auto result = outlier_filter(records, small_registry());
    CHECK(result.removed.empty());
    CHECK(result.retained.size() == records.size());
}

TEST_CASE("one extreme entity is removed, and only it") {
    // nine entities evenly spread plus one two orders of magnitude out
    std::vector<AveragedRecord> records;
    for (int i = 0; i < 9; ++i) {
        const double v = 0.08 + 0.005 * i;  // 0.08 .. 0.12
        records.push_back({"e" + std::to_string(i), {{"TIAX", v}, {"ROI", 0.02 + 0.01 * i}}});
    }
    records.push_back({"huge", {{"TIAX", 10.0}, {"ROI", 0.05}}});

    const auto result = outlier_filter(records, small_registry());
    REQUIRE(result.removed.size() == 1);
    CHECK(result.removed[0].entity == "huge");
    CHECK(result.removed[0].variable == "TIAX");
    CHECK(result.removed[0].iteration == 1);
    CHECK(result.retained.size() == 9);
    for (const auto& rec : result.retained) CHECK(rec.entity != "huge");
}

TEST_CASE("removal list is invariant under entity reordering") {
    auto records = spread_fixture(20, 9);
    records[3].values["TIAX"] = 50.0;   // extreme
    records[11].values["ROI"] = -40.0;  // extreme the other way

    const auto baseline = outlier_filter(records, small_registry());
    REQUIRE_FALSE(baseline.removed.empty());

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        auto shuffled = records;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto result = outlier_filter(shuffled, small_registry());
        REQUIRE(result.removed.size() == baseline.removed.size());
        for (std::size_t i = 0; i < result.removed.size(); ++i) {
            CHECK(result.removed[i].entity == baseline.removed[i].entity);
            CHECK(result.removed[i].iteration == baseline.removed[i].iteration);
        }
    }
}

TEST_CASE("retained records preserve the input order") {
    auto records = spread_fixture(12, 33);
    records[5].values["TIAX"] = 99.0;
    const auto result = outlier_filter(records, small_registry());
    std::vector<std::string> expected;
    for (const auto& r : records)
        if (r.entity != "e5") expected.push_back(r.entity);
    std::vector<std::string> got;
    for (const auto& r : result.retained) got.push_back(r.entity);
    CHECK(got == expected);
}

TEST_CASE("runaway filtering trips the removal cap") {
    // a geometric series is self-similar: removing its maximum leaves the
    // distribution just as collapsed, so the loop can never terminate on
    // its own and the cap must stop it
    std::vector<AveragedRecord> records;
    double v = 1.0;
    for (int i = 0; i < 20; ++i, v *= 1.5)
        records.push_back({"e" + std::to_string(i), {{"TIAX", v}, {"ROI", 0.01 * i}}});
    FilterPolicy policy;
    policy.collapse_share = 0.5;
    policy.max_removal_fraction = 0.2;
    CHECK_THROWS_AS(outlier_filter(records, small_registry(), policy), NumericError);
}

TEST_CASE("collapse trigger fires when one cell hoards the sample") {
    // a tight clump plus two distant entities: with the extremes present
    // the clump normalizes onto one spot (18/20 in cell 1); once they are
    // gone the clump spans its own range again and the share drops
    std::vector<AveragedRecord> records;
    for (int i = 0; i < 18; ++i)
        records.push_back(
            {"c" + std::to_string(10 + i), {{"TIAX", 0.10 + 0.002 * i}, {"ROI", 0.5 + 0.01 * i}}});
    records.push_back({"far1", {{"TIAX", 5.0}, {"ROI", 0.6}}});
    records.push_back({"far2", {{"TIAX", 6.0}, {"ROI", 0.7}}});

    FilterPolicy policy;
    policy.deviation_threshold = 1e9;  // only the collapse condition can trigger
    policy.collapse_share = 0.88;
    policy.max_removal_fraction = 0.3;
    const auto result = outlier_filter(records, small_registry(), policy);
    CHECK(result.removed.size() == 2);
    CHECK(result.removed[0].trigger == "collapse");
    CHECK(result.removed[0].entity == "far2");  // larger robust deviation than far1
}

TEST_CASE("invalid policies are rejected") {
    const auto records = spread_fixture(10, 3);
    FilterPolicy bad;
    bad.collapse_share = 1.5;
    CHECK_THROWS_AS(outlier_filter(records, small_registry(), bad), ConfigError);
    bad = FilterPolicy{};
    bad.deviation_threshold = 0.0;
    CHECK_THROWS_AS(outlier_filter(records, small_registry(), bad), ConfigError);
    bad = FilterPolicy{};
    bad.max_removal_fraction = -0.1;
    CHECK_THROWS_AS(outlier_filter(records, small_registry(), bad), ConfigError);
}

TEST_CASE("tiny samples are left alone") {
    const auto records = spread_fixture(2, 5);
    const auto result = outlier_filter(records, small_registry());
    CHECK(result.removed.empty());
    CHECK(result.retained.size() == 2);
}
