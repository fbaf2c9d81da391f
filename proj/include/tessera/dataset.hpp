#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tessera/detail/csv.hpp"
#include "tessera/error.hpp"
#include "tessera/variables.hpp"

namespace tessera {

/// One entity's period-averaged variable values.
struct AveragedRecord {
    std::string entity;
    std::map<std::string, double> values;  // variable name -> period average

    double at(const std::string& variable) const {
        auto it = values.find(variable);
        if (it == values.end())
            throw DataError("record for '" + entity + "' has no value for variable '" +
                            variable + "'");
        return it->second;
    }
};

/// Inclusive range of calendar years.
struct YearWindow {
    int first = 0;
    int last = 0;

    YearWindow() = default;
    YearWindow(int first_year, int last_year) : first(first_year), last(last_year) {
        if (last < first)
            throw ConfigError("year window ends before it starts: " + to_string());
    }

    bool contains(int year) const noexcept { return year >= first && year <= last; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(last - first) + 1; }
    bool overlaps(const YearWindow& other) const noexcept {
        return first <= other.last && other.first <= last;
    }

    std::vector<int> years() const {
        std::vector<int> out;
        for (int y = first; y <= last; ++y) out.push_back(y);
        return out;
    }

    std::string to_string() const {
        return std::to_string(first) + "-" + std::to_string(last);
    }

    /// Parses "2006-2007"; a single year "2006" means a one-year window.
    static YearWindow parse(const std::string& text) {
        const auto t = detail::trim(text);
        const auto dash = t.find('-', 1);  // skip a potential leading sign
        auto parse_year = [&](const std::string& s) {
            int y = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
            if (ec != std::errc() || p != s.data() + s.size())
                throw ConfigError("bad year '" + s + "' in window '" + text + "'");
            return y;
        };
        if (dash == std::string::npos) {
            const int y = parse_year(t);
            return YearWindow(y, y);
        }
        return YearWindow(parse_year(t.substr(0, dash)), parse_year(t.substr(dash + 1)));
    }
};

/// Column mapping for ingesting a delimited panel file: which columns hold
/// the entity id and year, and which variable each remaining column feeds.
struct DatasetSchema {
    std::string entity_column = "entity";
    std::string year_column = "year";
    std::vector<std::pair<std::string, std::string>> variable_columns;  // variable -> column
    std::vector<std::string> ignore_columns;
    char delimiter = ',';

    std::optional<std::string> variable_for_column(const std::string& column) const {
        for (const auto& [var, col] : variable_columns)
            if (col == column) return var;
        return std::nullopt;
    }

    std::optional<std::string> column_for(const std::string& variable) const {
        for (const auto& [var, col] : variable_columns)
            if (var == variable) return col;
        return std::nullopt;
    }

    bool ignored(const std::string& column) const {
        return std::find(ignore_columns.begin(), ignore_columns.end(), column) !=
               ignore_columns.end();
    }

    /// Identity schema for the standard registry: column names equal
    /// variable names.
    static DatasetSchema identity(const VariableRegistry& registry = VariableRegistry::standard()) {
        DatasetSchema s;
        for (const auto& v : registry) s.variable_columns.emplace_back(v.name, v.name);
        return s;
    }
};

/// The raw companies x years x variables cube. Entities are kept sorted and
/// unique, years strictly increasing, so equal content always compares (and
/// serializes) identically regardless of input row order.
class PanelDataset {
public:
    PanelDataset() = default;

    PanelDataset(std::vector<std::string> entities, std::vector<int> years,
                 std::vector<std::string> variables,
                 std::vector<std::optional<double>> cells)
        : entities_(std::move(entities)),
          years_(std::move(years)),
          variables_(std::move(variables)),
          cells_(std::move(cells)) {
        for (std::size_t i = 1; i < entities_.size(); ++i)
            if (entities_[i - 1] >= entities_[i])
                throw DataError("entity ids must be sorted and unique");
        for (std::size_t i = 1; i < years_.size(); ++i)
            if (years_[i - 1] >= years_[i])
                throw DataError("years must be strictly increasing");
        if (cells_.size() != entities_.size() * years_.size() * variables_.size())
            throw DataError("dataset cell count does not match its dimensions");
    }

    const std::vector<std::string>& entities() const noexcept { return entities_; }
    const std::vector<int>& years() const noexcept { return years_; }
    const std::vector<std::string>& variables() const noexcept { return variables_; }

    std::size_t entity_count() const noexcept { return entities_.size(); }

    std::optional<std::size_t> year_index(int year) const {
        auto it = std::lower_bound(years_.begin(), years_.end(), year);
        if (it == years_.end() || *it != year) return std::nullopt;
        return static_cast<std::size_t>(it - years_.begin());
    }

    std::optional<std::size_t> entity_index(const std::string& entity) const {
        auto it = std::lower_bound(entities_.begin(), entities_.end(), entity);
        if (it == entities_.end() || *it != entity) return std::nullopt;
        return static_cast<std::size_t>(it - entities_.begin());
    }

    std::optional<std::size_t> variable_index(const std::string& variable) const {
        auto it = std::find(variables_.begin(), variables_.end(), variable);
        if (it == variables_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - variables_.begin());
    }

    const std::optional<double>& cell(std::size_t e, std::size_t y, std::size_t v) const {
        return cells_.at((e * years_.size() + y) * variables_.size() + v);
    }

    std::optional<double> value(const std::string& entity, int year,
                                const std::string& variable) const {
        const auto e = entity_index(entity);
        const auto y = year_index(year);
        const auto v = variable_index(variable);
        if (!e || !y || !v) return std::nullopt;
        return cell(*e, *y, *v);
    }

    friend bool operator==(const PanelDataset&, const PanelDataset&) = default;

private:
    std::vector<std::string> entities_;
    std::vector<int> years_;
    std::vector<std::string> variables_;
    std::vector<std::optional<double>> cells_;  // [entity][year][variable]
};

namespace detail {

inline double parse_number(const std::string& field, std::size_t row,
                           const std::string& column) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size())
        throw DataError("row " + std::to_string(row) + ": cannot parse '" + field +
                        "' in column '" + column + "' as a number (decimal point required)");
    return v;
}

} // namespace detail

/// Reads a delimited panel table: one header row, then one row per
/// (entity, year). Row order never affects the result. Unknown columns are
/// an error unless the schema lists them under ignore_columns.
inline PanelDataset ingest(std::istream& in, const DatasetSchema& schema,
                           const VariableRegistry& registry = VariableRegistry::standard()) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("input is empty: no header row");
    const auto header = detail::split_fields(line, schema.delimiter);

    for (const auto& [var, col] : schema.variable_columns) {
        (void)col;
        if (!registry.contains(var))
            throw ConfigError("schema maps column to unknown variable '" + var + "'");
    }
    if (schema.variable_columns.empty()) throw ConfigError("schema maps no variable columns");

    // Dataset variables: the mapped variables whose columns actually appear,
    // in registry order.
    std::ptrdiff_t entity_col = -1, year_col = -1;
    std::vector<std::pair<std::string, std::size_t>> found;  // variable -> header index
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto name = detail::trim(header[c]);
        if (name == schema.entity_column) {
            entity_col = static_cast<std::ptrdiff_t>(c);
        } else if (name == schema.year_column) {
            year_col = static_cast<std::ptrdiff_t>(c);
        } else if (auto var = schema.variable_for_column(name)) {
            found.emplace_back(*var, c);
        } else if (!schema.ignored(name)) {
            throw DataError("unknown column '" + name +
                            "' (map it to a variable or list it under ignore)");
        }
    }
    if (entity_col < 0) throw DataError("entity column '" + schema.entity_column + "' not found");
    if (year_col < 0) throw DataError("year column '" + schema.year_column + "' not found");
    if (found.empty()) throw DataError("no mapped variable columns in the header");

    std::vector<std::string> variables;
    std::vector<std::ptrdiff_t> var_col;
    for (const auto& v : registry) {
        for (const auto& [var, c] : found) {
            if (var == v.name) {
                variables.push_back(var);
                var_col.push_back(static_cast<std::ptrdiff_t>(c));
                break;
            }
        }
    }

    struct Row {
        std::string entity;
        int year;
        std::vector<std::optional<double>> values;
    };
    std::vector<Row> rows;
    std::set<std::pair<std::string, int>> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line, schema.delimiter);
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        Row row;
        row.entity = detail::trim(fields[static_cast<std::size_t>(entity_col)]);
        if (row.entity.empty())
            throw DataError("row " + std::to_string(lineno) + ": empty entity id");
        const auto year_field = detail::trim(fields[static_cast<std::size_t>(year_col)]);
        {
            auto [p, ec] = std::from_chars(year_field.data(),
                                           year_field.data() + year_field.size(), row.year);
            if (ec != std::errc() || p != year_field.data() + year_field.size())
                throw DataError("row " + std::to_string(lineno) + ": bad year '" +
                                year_field + "'");
        }
        if (!seen.emplace(row.entity, row.year).second)
            throw DataError("row " + std::to_string(lineno) + ": duplicate (entity, year) pair (" +
                            row.entity + ", " + std::to_string(row.year) + ")");
        row.values.resize(variables.size());
        for (std::size_t v = 0; v < variables.size(); ++v) {
            const auto& field = fields[static_cast<std::size_t>(var_col[v])];
            const auto t = detail::trim(field);
            if (t.empty() || t == "n/a" || t == "NA") continue;  // missing marker
            row.values[v] = detail::parse_number(t, lineno, *schema.column_for(variables[v]));
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::string> entities;
    std::vector<int> years;
    for (const auto& r : rows) {
        entities.push_back(r.entity);
        years.push_back(r.year);
    }
    std::sort(entities.begin(), entities.end());
    entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());

    std::vector<std::optional<double>> cells(entities.size() * years.size() * variables.size());
    const auto yi = [&](int y) {
        return static_cast<std::size_t>(
            std::lower_bound(years.begin(), years.end(), y) - years.begin());
    };
    const auto ei = [&](const std::string& e) {
        return static_cast<std::size_t>(
            std::lower_bound(entities.begin(), entities.end(), e) - entities.begin());
    };
    for (const auto& r : rows) {
        const std::size_t base = (ei(r.entity) * years.size() + yi(r.year)) * variables.size();
        for (std::size_t v = 0; v < variables.size(); ++v) cells[base + v] = r.values[v];
    }
    return PanelDataset(std::move(entities), std::move(years), std::move(variables),
                        std::move(cells));
}

inline PanelDataset ingest_file(const std::string& path, const DatasetSchema& schema,
                                const VariableRegistry& registry = VariableRegistry::standard()) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file '" + path + "'");
    return ingest(in, schema, registry);
}

/// Re-emits a dataset in the same delimited layout ingest() reads, at full
/// precision, so ingest(write(d)) == d.
inline void write_dataset(const PanelDataset& data, std::ostream& out,
                          const DatasetSchema& schema) {
    std::vector<std::string> header{schema.entity_column, schema.year_column};
    for (const auto& var : data.variables()) {
        const auto col = schema.column_for(var);
        header.push_back(col ? *col : var);
    }
    out << detail::join_fields(header, schema.delimiter) << '\n';
    for (std::size_t e = 0; e < data.entities().size(); ++e) {
        for (std::size_t y = 0; y < data.years().size(); ++y) {
            std::vector<std::string> fields{data.entities()[e],
                                            std::to_string(data.years()[y])};
            bool any = false;
            for (std::size_t v = 0; v < data.variables().size(); ++v) {
                const auto& cell = data.cell(e, y, v);
                fields.push_back(cell ? detail::format_full(*cell) : "");
                any = any || cell.has_value();
            }
            if (any) out << detail::join_fields(fields, schema.delimiter) << '\n';
        }
    }
}

inline std::string write_dataset_string(const PanelDataset& data, const DatasetSchema& schema) {
    std::ostringstream os;
    write_dataset(data, os, schema);
    return os.str();
}

/// Arithmetic mean of each requested variable over the window, one record
/// per entity in entity order. Every (entity, variable, year) cell inside
/// the window must be present.
inline std::vector<AveragedRecord> average_over_window(const PanelDataset& data,
                                                       const YearWindow& window,
                                                       const std::vector<std::string>& variables) {
    std::vector<std::size_t> year_idx;
    for (int y = window.first; y <= window.last; ++y) {
        const auto i = data.year_index(y);
        if (!i)
            throw DataError("averaging window " + window.to_string() +
                            " requests year " + std::to_string(y) + " absent from the dataset");
        year_idx.push_back(*i);
    }
    std::vector<std::size_t> var_idx;
    for (const auto& v : variables) {
        const auto i = data.variable_index(v);
        if (!i) throw DataError("dataset has no variable '" + v + "'");
        var_idx.push_back(*i);
    }

    std::vector<AveragedRecord> out;
    out.reserve(data.entity_count());
    for (std::size_t e = 0; e < data.entity_count(); ++e) {
        AveragedRecord rec;
        rec.entity = data.entities()[e];
        for (std::size_t k = 0; k < variables.size(); ++k) {
            double sum = 0.0;
            for (const auto y : year_idx) {
                const auto& cell = data.cell(e, y, var_idx[k]);
                if (!cell)
                    throw DataError("missing value: entity '" + rec.entity + "', variable '" +
                                    variables[k] + "', year " +
                                    std::to_string(data.years()[y]));
                sum += *cell;
            }
            rec.values[variables[k]] = sum / static_cast<double>(year_idx.size());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

/// Full averaged records: innovation variables averaged over the innovation
/// window, performance variables over the performance window, merged into
/// one record per entity.
inline std::vector<AveragedRecord> average_panel(
    const PanelDataset& data, const YearWindow& innovation_window,
    const YearWindow& performance_window,
    const VariableRegistry& registry = VariableRegistry::standard()) {
    std::vector<std::string> innovation_vars, performance_vars;
    for (const auto& var : data.variables()) {
        const auto* info = registry.find(var);
        if (!info) throw DataError("dataset variable '" + var + "' is not in the registry");
        (is_performance(info->group) ? performance_vars : innovation_vars).push_back(var);
    }
    auto inn = innovation_vars.empty()
                   ? std::vector<AveragedRecord>{}
                   : average_over_window(data, innovation_window, innovation_vars);
    auto perf = performance_vars.empty()
                    ? std::vector<AveragedRecord>{}
                    : average_over_window(data, performance_window, performance_vars);
    if (inn.empty()) return perf;
    if (perf.empty()) return inn;
    for (std::size_t i = 0; i < inn.size(); ++i)
        inn[i].values.insert(perf[i].values.begin(), perf[i].values.end());
    return inn;
}

} // namespace tessera
