#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tessera/analytics.hpp"
#include "tessera/clustering.hpp"
#include "tessera/config.hpp"
#include "tessera/dataset.hpp"
#include "tessera/error.hpp"
#include "tessera/normalize.hpp"
#include "tessera/outlier.hpp"
#include "tessera/report.hpp"
#include "tessera/stats.hpp"

namespace tessera {

namespace detail {

inline std::string safe_filename(const std::string& name) {
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file '" + path.string() + "'");
    out << text;
}

} // namespace detail

/// Writes an assignment as `# cells=H` followed by entity,cell,tie rows.
inline std::string assignment_to_text(const ClusterAssignment& a, char delim = ',') {
    std::string out = "# cells=" + std::to_string(a.cell_count) + "\n";
    out += detail::join_fields({"entity", "cell", "tie"}, delim) + "\n";
    for (std::size_t i = 0; i < a.entities.size(); ++i)
        out += detail::join_fields({a.entities[i], std::to_string(a.cells[i]),
                                    a.tie_flags[i] ? "1" : "0"},
                                   delim) +
               "\n";
    return out;
}

inline ClusterAssignment assignment_from_text(const std::string& text, char delim = ',') {
    std::istringstream in(text);
    std::string line;
    ClusterAssignment a;
    a.cell_count = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        if (t.rfind("# cells=", 0) == 0) {
            a.cell_count = std::stoi(t.substr(8));
            continue;
        }
        if (t.front() == '#') continue;
        const auto fields = detail::split_fields(line, delim);
        if (!have_header) {
            if (fields.size() < 2 || fields[0] != "entity")
                throw DataError("assignment file: bad header");
            have_header = true;
            continue;
        }
        if (fields.size() < 3) throw DataError("assignment file: short row '" + line + "'");
        a.entities.push_back(fields[0]);
        a.cells.push_back(std::stoi(fields[1]));
        a.tie_flags.push_back(fields[2] == "1");
    }
    if (!have_header) throw DataError("assignment file has no rows");
    if (a.cell_count == 0)
        for (const int c : a.cells) a.cell_count = std::max(a.cell_count, c);
    a.cardinalities.assign(static_cast<std::size_t>(a.cell_count), 0);
    for (const int c : a.cells) {
        if (c < 1 || c > a.cell_count)
            throw DataError("assignment file: cell index " + std::to_string(c) +
                            " outside 1.." + std::to_string(a.cell_count));
        a.cardinalities[static_cast<std::size_t>(c - 1)]++;
    }
    return a;
}

inline ClusterAssignment read_assignment_file(const std::string& path, char delim = ',') {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open assignment file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return assignment_from_text(buf.str(), delim);
}

struct RunSummary {
    std::size_t entities_before = 0;
    std::size_t entities_after = 0;
    std::vector<OutlierRemoval> removed;
    std::vector<std::pair<std::string, std::size_t>> tie_counts;  // per assignment label
    std::vector<std::string> steps;
    std::vector<std::string> output_files;  // relative to out_dir, write order
    std::string manifest_path;
};

/// Runs the whole pipeline: ingest, average, filter (optional), normalize,
/// cluster, analyze, report. Outputs land in config.out_dir; the manifest
/// records the executed step order, the config hash, entity counts before
/// and after filtering and per-assignment tie counts. Fixed input and
/// config produce byte-identical outputs.
inline RunSummary run_pipeline(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    config.validate();
    const VariableRegistry& registry = config.registry;

    RunSummary summary;
    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    auto emit = [&](const std::string& name, const std::string& text) {
        detail::write_text_file(out_dir / name, text);
        summary.output_files.push_back(name);
    };

    // ingest
    const auto data = ingest_file(config.input_path, config.schema, registry);
    summary.steps.push_back("ingest");

    // average
    auto records =
        average_panel(data, config.innovation_window, config.performance_window, registry);
    summary.entities_before = records.size();
    summary.steps.push_back("average");

    // filter (optional)
    std::vector<NormalizedMatrix::Range> original_ranges_innovation, original_ranges_performance;
    std::vector<std::string> innovation_vars, performance_vars;
    for (const auto& var : data.variables()) {
        const auto* info = registry.find(var);
        (is_performance(info->group) ? performance_vars : innovation_vars).push_back(var);
    }
    if (config.filter_enabled) {
        if (config.renormalize == RenormalizeMode::original) {
            original_ranges_innovation = minmax_normalize(records, innovation_vars).ranges();
            original_ranges_performance = minmax_normalize(records, performance_vars).ranges();
        }
        auto filtered = outlier_filter(records, registry, config.filter);
        summary.removed = filtered.removed;
        records = std::move(filtered.retained);
        summary.steps.push_back("filter");
    }
    summary.entities_after = records.size();

    // normalize
    const auto matrix_innovation =
        (config.filter_enabled && config.renormalize == RenormalizeMode::original)
            ? normalize_with_ranges(records, innovation_vars, original_ranges_innovation)
            : minmax_normalize(records, innovation_vars);
    const auto matrix_performance =
        (config.filter_enabled && config.renormalize == RenormalizeMode::original)
            ? normalize_with_ranges(records, performance_vars, original_ranges_performance)
            : minmax_normalize(records, performance_vars);
    summary.steps.push_back("normalize");

    // cluster; preset weights are rebuilt over the variables the dataset
    // actually carries (custom schemes are taken as declared)
    ScenarioConfig scenario_config = config.scenario;
    if (scenario_config.id != ScenarioId::custom) {
        std::vector<Variable> present;
        for (const auto& v : registry)
            if (data.variable_index(v.name)) present.push_back(v);
        auto rebuilt = ScenarioConfig::preset(scenario_config.id, VariableRegistry(present));
        rebuilt.innovation_centroids = scenario_config.innovation_centroids;
        rebuilt.performance_centroids = scenario_config.performance_centroids;
        rebuilt.tie_epsilon = scenario_config.tie_epsilon;
        scenario_config = rebuilt;
    }
    const auto scenario =
        run_scenario(matrix_innovation, matrix_performance, scenario_config, config.workers);
    summary.steps.push_back("cluster");

    // analyze
    std::vector<std::pair<std::string, StatsSummary>> stats;
    for (const auto& var : data.variables()) {
        std::vector<double> col;
        col.reserve(records.size());
        for (const auto& rec : records) col.push_back(rec.at(var));
        stats.emplace_back(var, describe(col));
    }
    const bool single_pair =
        scenario.innovation.size() == 1 && scenario.performance.size() == 1;
    std::optional<CrossTab> ct;
    std::vector<ClusterProfile> profiles_innovation, profiles_performance;
    if (single_pair) {
        ct = crosstab(scenario.innovation.front().assignment,
                      scenario.performance.front().assignment);
        profiles_innovation = profile_clusters(scenario.innovation.front().assignment,
                                               records, data.variables());
        profiles_performance = profile_clusters(scenario.performance.front().assignment,
                                                records, data.variables());
    }
    summary.steps.push_back("analyze");

    // report
    const char delim = config.output_delimiter;
    emit("normalized_innovation.csv",
         to_delimited(render_matrix(matrix_innovation, "normalized innovation matrix"), delim));
    emit("normalized_performance.csv",
         to_delimited(render_matrix(matrix_performance, "normalized performance matrix"), delim));
    emit("ranges_innovation.csv",
         to_delimited(render_ranges(matrix_innovation, "innovation normalization ranges"), delim));
    emit("ranges_performance.csv",
         to_delimited(render_ranges(matrix_performance, "performance normalization ranges"),
                      delim));

    auto emit_assignments = [&](const std::vector<LabeledAssignment>& list,
                                const std::string& set_name) {
        for (const auto& [label, assignment] : list) {
            const auto name = list.size() == 1
                                  ? "assignment_" + set_name + ".csv"
                                  : "assignment_" + set_name + "_" +
                                        detail::safe_filename(label) + ".csv";
            emit(name, assignment_to_text(assignment, delim));
            summary.tie_counts.emplace_back(set_name + "/" + label, assignment.tie_count());
        }
    };
    emit_assignments(scenario.innovation, "innovation");
    emit_assignments(scenario.performance, "performance");

    emit("stats.csv", to_delimited(render_stats_table(stats), delim));
    emit("stats.md", to_markdown(render_stats_table(stats)));
    if (ct) {
        const auto table = render_crosstab(*ct, "innovation", "performance");
        emit("crosstab.csv", to_delimited(table, delim));
        emit("crosstab.md", to_markdown(table));
        const auto pi = render_profiles(profiles_innovation, data.variables(),
                                        "innovation cluster profiles");
        const auto pp = render_profiles(profiles_performance, data.variables(),
                                        "performance cluster profiles");
        emit("profiles_innovation.csv", to_delimited(pi, delim));
        emit("profiles_innovation.md", to_markdown(pi));
        emit("profiles_performance.csv", to_delimited(pp, delim));
        emit("profiles_performance.md", to_markdown(pp));
    }
    summary.steps.push_back("report");

    // manifest
    nlohmann::ordered_json manifest;
    manifest["tool"] = "tessera";
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof hash_hex, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(config.source_hash));
    manifest["config_hash"] = hash_hex;
    manifest["scenario"] = to_string(config.scenario.id);
    manifest["steps"] = summary.steps;
    manifest["entities_before_filter"] = summary.entities_before;
    manifest["entities_after_filter"] = summary.entities_after;
    manifest["removed"] = nlohmann::ordered_json::array();
    for (const auto& r : summary.removed)
        manifest["removed"].push_back({{"entity", r.entity},
                                       {"iteration", r.iteration},
                                       {"variable", r.variable},
                                       {"deviation", r.deviation},
                                       {"trigger", r.trigger}});
    manifest["tie_counts"] = nlohmann::ordered_json::object();
    for (const auto& [label, count] : summary.tie_counts) manifest["tie_counts"][label] = count;
    manifest["outputs"] = summary.output_files;
    detail::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    summary.output_files.push_back("manifest.json");
    summary.manifest_path = (out_dir / "manifest.json").string();
    return summary;
}

} // namespace tessera
