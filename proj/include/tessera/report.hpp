#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tessera/analytics.hpp"
#include "tessera/detail/csv.hpp"
#include "tessera/error.hpp"
#include "tessera/normalize.hpp"
#include "tessera/stats.hpp"

namespace tessera {

/// One table cell: unavailable, an integer count, or a real value.
using ReportCell = std::variant<std::monostate, long long, double>;

/// Rectangular labelled table. Two sinks render it: a delimited form at
/// full precision for pipelines, and a markdown form at fixed precision for
/// people. Rendering is deterministic; equal tables yield equal bytes.
struct ReportTable {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::string> row_labels;
    std::vector<std::vector<ReportCell>> cells;

    void validate() const {
        if (cells.size() != row_labels.size())
            throw DataError("report table: one label per row required");
        for (const auto& row : cells)
            if (row.size() != columns.size())
                throw DataError("report table is not rectangular");
    }
};

namespace detail {

inline std::string render_cell_full(const ReportCell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return "n/a";
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    return format_full(std::get<double>(cell));
}

inline std::string render_cell_fixed(const ReportCell& cell, int precision) {
    if (std::holds_alternative<std::monostate>(cell)) return "n/a";
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    return format_fixed(std::get<double>(cell), precision);
}

inline ReportCell parse_cell(const std::string& field) {
    const auto t = trim(field);
    if (t.empty() || t == "n/a") return std::monostate{};
    long long i = 0;
    {
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), i);
        if (ec == std::errc() && p == t.data() + t.size()) return i;
    }
    double d = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), d);
    if (ec == std::errc() && p == t.data() + t.size()) return d;
    throw DataError("report cell '" + t + "' is neither a number nor n/a");
}

} // namespace detail

/// Delimited machine sink, full precision. Reals carry 17 significant
/// digits so parse_delimited() recovers them exactly.
inline std::string to_delimited(const ReportTable& table, char delim = ',') {
    table.validate();
    std::string out;
    if (!table.title.empty()) out += "# " + table.title + "\n";
    std::vector<std::string> header{""};
    header.insert(header.end(), table.columns.begin(), table.columns.end());
    out += detail::join_fields(header, delim) + "\n";
    for (std::size_t r = 0; r < table.cells.size(); ++r) {
        std::vector<std::string> fields{table.row_labels[r]};
        for (const auto& cell : table.cells[r])
            fields.push_back(detail::render_cell_full(cell));
        out += detail::join_fields(fields, delim) + "\n";
    }
    return out;
}

inline ReportTable parse_delimited(const std::string& text, char delim = ',') {
    std::istringstream in(text);
    std::string line;
    ReportTable table;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            table.title = line.substr(2);
            continue;
        }
        auto fields = detail::split_fields(line, delim);
        if (fields.empty()) continue;
        if (!have_header) {
            table.columns.assign(fields.begin() + 1, fields.end());
            have_header = true;
            continue;
        }
        table.row_labels.push_back(fields.front());
        std::vector<ReportCell> row;
        for (std::size_t i = 1; i < fields.size(); ++i)
            row.push_back(detail::parse_cell(fields[i]));
        if (row.size() != table.columns.size())
            throw DataError("report table row has " + std::to_string(row.size()) +
                            " cells, expected " + std::to_string(table.columns.size()));
        table.cells.push_back(std::move(row));
    }
    if (!have_header) throw DataError("report table text has no header row");
    return table;
}

/// Markdown human sink; reals at `precision` decimal places.
inline std::string to_markdown(const ReportTable& table, int precision = 2) {
    table.validate();
    std::string out;
    if (!table.title.empty()) out += "## " + table.title + "\n\n";
    out += "|  |";
    for (const auto& c : table.columns) out += " " + c + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += "---|";
    out += "\n";
    for (std::size_t r = 0; r < table.cells.size(); ++r) {
        out += "| " + table.row_labels[r] + " |";
        for (const auto& cell : table.cells[r])
            out += " " + detail::render_cell_fixed(cell, precision) + " |";
        out += "\n";
    }
    return out;
}

namespace detail {

inline ReportCell opt_cell(const std::optional<double>& v) {
    if (!v) return std::monostate{};
    return *v;
}

} // namespace detail

/// One column per variable; rows in the classic descriptive order: mean,
/// std.dev, mean/std, min, max, Q1, median, Q3, skewness, kurtosis.
/// Unavailable moments render as n/a.
inline ReportTable render_stats_table(
    const std::vector<std::pair<std::string, StatsSummary>>& summaries,
    std::string title = "descriptive statistics") {
    if (summaries.empty()) throw DataError("stats table needs at least one summary");
    ReportTable t;
    t.title = std::move(title);
    for (const auto& [var, s] : summaries) {
        (void)s;
        t.columns.push_back(var);
    }
    t.row_labels = {"mean", "std.dev", "mean/std", "min",      "max",
                    "Q1",   "median",  "Q3",       "skewness", "kurtosis"};
    t.cells.assign(t.row_labels.size(), {});
    for (const auto& [var, s] : summaries) {
        (void)var;
        t.cells[0].push_back(s.mean);
        t.cells[1].push_back(detail::opt_cell(s.stddev));
        t.cells[2].push_back(detail::opt_cell(s.mean_std_ratio));
        t.cells[3].push_back(s.min);
        t.cells[4].push_back(s.max);
        t.cells[5].push_back(s.q1);
        t.cells[6].push_back(s.median);
        t.cells[7].push_back(s.q3);
        t.cells[8].push_back(detail::opt_cell(s.skewness));
        t.cells[9].push_back(detail::opt_cell(s.kurtosis));
    }
    return t;
}

/// H x K count grid with row and column totals appended.
inline ReportTable render_crosstab(const CrossTab& ct, const std::string& row_name,
                                   const std::string& col_name,
                                   std::string title = "cluster cross-tabulation") {
    ReportTable t;
    t.title = std::move(title);
    for (std::size_t c = 0; c < ct.cols; ++c)
        t.columns.push_back(col_name + " " + std::to_string(c + 1));
    t.columns.push_back("Tot");
    for (std::size_t r = 0; r < ct.rows; ++r) {
        t.row_labels.push_back(row_name + " " + std::to_string(r + 1));
        std::vector<ReportCell> row;
        for (std::size_t c = 0; c < ct.cols; ++c)
            row.push_back(static_cast<long long>(ct.counts[r][c]));
        row.push_back(static_cast<long long>(ct.row_totals[r]));
        t.cells.push_back(std::move(row));
    }
    t.row_labels.push_back("Tot");
    std::vector<ReportCell> totals;
    for (std::size_t c = 0; c < ct.cols; ++c)
        totals.push_back(static_cast<long long>(ct.col_totals[c]));
    totals.push_back(static_cast<long long>(ct.grand_total));
    t.cells.push_back(std::move(totals));
    return t;
}

/// Per-cluster profile rows (mean, std.dev, mean/std per cluster) with the
/// cluster size in the leading column.
inline ReportTable render_profiles(const std::vector<ClusterProfile>& profiles,
                                   const std::vector<std::string>& variables,
                                   std::string title = "cluster profiles") {
    ReportTable t;
    t.title = std::move(title);
    t.columns.push_back("n");
    for (const auto& v : variables) t.columns.push_back(v);
    for (const auto& p : profiles) {
        const std::string base = "cluster " + std::to_string(p.cell);
        const char* metric[3] = {"mean", "std.dev", "mean/std"};
        for (int m = 0; m < 3; ++m) {
            t.row_labels.push_back(base + " " + metric[m]);
            std::vector<ReportCell> row;
            row.push_back(static_cast<long long>(p.size));
            for (const auto& var : variables) {
                ReportCell cell = std::monostate{};
                for (const auto& [name, s] : p.variable_stats) {
                    if (name != var) continue;
                    if (m == 0) cell = s.mean;
                    if (m == 1) cell = detail::opt_cell(s.stddev);
                    if (m == 2) cell = detail::opt_cell(s.mean_std_ratio);
                    break;
                }
                row.push_back(cell);
            }
            t.cells.push_back(std::move(row));
        }
    }
    return t;
}

/// Normalized values, entities as rows.
inline ReportTable render_matrix(const NormalizedMatrix& matrix,
                                 std::string title = "normalized matrix") {
    ReportTable t;
    t.title = std::move(title);
    t.columns = matrix.variables();
    for (std::size_t e = 0; e < matrix.entity_count(); ++e) {
        t.row_labels.push_back(matrix.entities()[e]);
        std::vector<ReportCell> row;
        for (std::size_t v = 0; v < matrix.variable_count(); ++v)
            row.push_back(matrix.at(e, v));
        t.cells.push_back(std::move(row));
    }
    return t;
}

/// The (min, max) pair each variable was scaled with.
inline ReportTable render_ranges(const NormalizedMatrix& matrix,
                                 std::string title = "normalization ranges") {
    ReportTable t;
    t.title = std::move(title);
    t.columns = {"min", "max"};
    for (std::size_t v = 0; v < matrix.variable_count(); ++v) {
        t.row_labels.push_back(matrix.variables()[v]);
        t.cells.push_back({matrix.range(v).min, matrix.range(v).max});
    }
    return t;
}

} // namespace tessera
