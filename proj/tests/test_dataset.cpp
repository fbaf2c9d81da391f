#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <vector>

#include "tessera/dataset.hpp"

using namespace tessera;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DatasetSchema two_var_schema() {
    DatasetSchema s;
    s.variable_columns = {{"TIAX", "TIAX"}, {"TTA", "TTA"}};
    return s;
}

PanelDataset ingest_text(const std::string& text, const DatasetSchema& schema) {
    std::istringstream in(text);
    return ingest(in, schema);
}

} // namespace

TEST_CASE("ingest a small well-formed panel") {
    const auto data = ingest_text(
        "entity,year,TIAX,TTA\n"
        "a,2006,1.5,2.5\n"
        "a,2007,2.0,3.0\n"
        "b,2006,4.0,5.0\n"
        "b,2007,6.0,7.0\n",
        two_var_schema());
    CHECK(data.entities() == std::vector<std::string>{"a", "b"});
    CHECK(data.years() == std::vector<int>{2006, 2007});
    CHECK(data.variables() == std::vector<std::string>{"TIAX", "TTA"});
    CHECK(data.value("a", 2006, "TIAX") == 1.5);
    CHECK(data.value("b", 2007, "TTA") == 7.0);
}

TEST_CASE("duplicate (entity, year) rows are rejected with the row number") {
    CHECK_THROWS_MATCHES(ingest_text("entity,year,TIAX,TTA\n"
                                     "a,2006,1.0,2.0\n"
                                     "a,2006,1.0,2.0\n",
                                     two_var_schema()),
                         DataError, Catch::Matchers::MessageMatches(ContainsSubstring("row 3")));
}

TEST_CASE("row order does not affect the dataset") {
    const std::string rows[] = {"a,2006,1.0,2.0", "a,2007,3.0,4.0", "b,2006,5.0,6.0",
                                "b,2007,7.0,8.0"};
    std::vector<std::size_t> perm{0, 1, 2, 3};
    std::mt19937_64 rng(7);
    const auto sorted =
        ingest_text("entity,year,TIAX,TTA\n" + rows[0] + "\n" + rows[1] + "\n" + rows[2] +
                        "\n" + rows[3] + "\n",
                    two_var_schema());
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::string text = "entity,year,TIAX,TTA\n";
        for (const auto i : perm) text += rows[i] + "\n";
        CHECK(ingest_text(text, two_var_schema()) == sorted);
    }
}

TEST_CASE("unknown columns are errors unless ignored") {
    const std::string text =
        "entity,year,TIAX,TTA,notes\n"
        "a,2006,1.0,2.0,hello\n"
        "b,2006,3.0,4.0,world\n";
    CHECK_THROWS_AS(ingest_text(text, two_var_schema()), DataError);
    auto schema = two_var_schema();
    schema.ignore_columns.push_back("notes");
    CHECK_NOTHROW(ingest_text(text, schema));
}

TEST_CASE("malformed rows report their line") {
    CHECK_THROWS_MATCHES(ingest_text("entity,year,TIAX,TTA\n"
                                     "a,2006,1.0\n",
                                     two_var_schema()),
                         DataError, Catch::Matchers::MessageMatches(ContainsSubstring("row 2")));
    // decimal commas split the row apart or fail the number parse
    CHECK_THROWS_AS(ingest_text("entity\tyear\tTIAX\tTTA\n"
                                "a\t2006\t1,5\t2.0\n",
                                [] {
                                    auto s = two_var_schema();
                                    s.delimiter = '\t';
                                    return s;
                                }()),
                    DataError);
    CHECK_THROWS_AS(ingest_text("entity,year,TIAX,TTA\na,20x6,1.0,2.0\n", two_var_schema()),
                    DataError);
}

TEST_CASE("empty input is an ingestion error") {
    CHECK_THROWS_AS(ingest_text("", two_var_schema()), DataError);
}

TEST_CASE("two-point average") {
    const auto data = ingest_text(
        "entity,year,TIAX,TTA\n"
        "a,2006,10,30\n"
        "a,2007,20,30\n",
        two_var_schema());
    const auto recs = average_over_window(data, YearWindow(2006, 2007), {"TIAX", "TTA"});
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].at("TIAX") == 15.0);
    CHECK(recs[0].at("TTA") == 30.0);  // constant series stays put
}

TEST_CASE("three-year mean of ROI") {
    DatasetSchema schema;
    schema.variable_columns = {{"ROI", "ROI"}};
    const auto data = ingest_text(
        "entity,year,ROI\n"
        "a,2008,0.03\n"
        "a,2009,0.06\n"
        "a,2010,0.06\n",
        schema);
    const auto recs = average_over_window(data, YearWindow(2008, 2010), {"ROI"});
    CHECK_THAT(recs[0].at("ROI"), WithinAbs(0.05, 1e-15));
}

TEST_CASE("missing value inside the window names entity, variable and year") {
    const auto data = ingest_text(
        "entity,year,TIAX,TTA\n"
        "a,2006,1.0,2.0\n"
        "a,2007,,3.0\n",
        two_var_schema());
    CHECK_THROWS_MATCHES(
        average_over_window(data, YearWindow(2006, 2007), {"TIAX"}), DataError,
        Catch::Matchers::MessageMatches(ContainsSubstring("'a'") &&
                                        ContainsSubstring("'TIAX'") &&
                                        ContainsSubstring("2007")));
}

TEST_CASE("window years missing from the panel are an error") {
    const auto data = ingest_text("entity,year,TIAX,TTA\na,2006,1.0,2.0\n", two_var_schema());
    CHECK_THROWS_AS(average_over_window(data, YearWindow(2006, 2007), {"TIAX"}), DataError);
}

TEST_CASE("averaging is linear in the data") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    std::string text = "entity,year,TIAX,TTA\n";
    std::string doubled = text;
    for (int e = 0; e < 6; ++e) {
        for (int y = 2006; y <= 2007; ++y) {
            const double a = unif(rng), b = unif(rng);
            const auto id = "e" + std::to_string(e);
            text += id + "," + std::to_string(y) + "," + detail::format_full(a) + "," +
                    detail::format_full(b) + "\n";
            doubled += id + "," + std::to_string(y) + "," + detail::format_full(2.0 * a) + "," +
                       detail::format_full(b) + "\n";
        }
    }
    const auto base =
        average_over_window(ingest_text(text, two_var_schema()), YearWindow(2006, 2007),
                            {"TIAX", "TTA"});
    const auto scaled =
        average_over_window(ingest_text(doubled, two_var_schema()), YearWindow(2006, 2007),
                            {"TIAX", "TTA"});
    for (std::size_t i = 0; i < base.size(); ++i) {
        // scaling by a power of two commutes with rounding, so this is exact
        CHECK(scaled[i].at("TIAX") == 2.0 * base[i].at("TIAX"));
        CHECK(scaled[i].at("TTA") == base[i].at("TTA"));
    }
}

TEST_CASE("ingest, re-emit, re-ingest is a fixed point") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::string text = "entity,year,TIAX,TTA\n";
    for (int e = 0; e < 5; ++e)
        for (int y = 2006; y <= 2010; ++y)
            text += "e" + std::to_string(e) + "," + std::to_string(y) + "," +
                    detail::format_full(unif(rng) * 1e6) + "," +
                    detail::format_full(unif(rng)) + "\n";
    const auto schema = two_var_schema();
    const auto data = ingest_text(text, schema);
    const auto round_tripped = ingest_text(write_dataset_string(data, schema), schema);
    CHECK(round_tripped == data);
}

TEST_CASE("average_panel merges the two windows") {
    DatasetSchema schema;
    schema.variable_columns = {{"TIAX", "TIAX"}, {"ROI", "ROI"}};
    std::string text = "entity,year,TIAX,ROI\n";
    for (int y = 2006; y <= 2010; ++y)
        text += "a," + std::to_string(y) + "," + std::to_string(y - 2006) + ".0,0.5\n";
    text += "b,2006,9.0,0.25\nb,2007,9.0,0.25\nb,2008,9.0,0.25\nb,2009,9.0,0.25\nb,2010,9.0,0.25\n";
    const auto data = ingest_text(text, schema);
    const auto recs = average_panel(data, YearWindow(2006, 2007), YearWindow(2008, 2010));
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].entity == "a");
    CHECK(recs[0].at("TIAX") == 0.5);  // (0 + 1) / 2, innovation window only
    CHECK(recs[0].at("ROI") == 0.5);
    CHECK(recs[1].at("TIAX") == 9.0);
}

TEST_CASE("year window parsing and validation") {
    CHECK(YearWindow::parse("2006-2007").first == 2006);
    CHECK(YearWindow::parse("2006-2007").last == 2007);
    CHECK(YearWindow::parse("2008").size() == 1);
    CHECK_THROWS_AS(YearWindow(2008, 2006), ConfigError);
    CHECK_THROWS_AS(YearWindow::parse("abc"), ConfigError);
    CHECK(YearWindow(2006, 2007).overlaps(YearWindow(2007, 2010)));
    CHECK_FALSE(YearWindow(2006, 2007).overlaps(YearWindow(2008, 2010)));
}
