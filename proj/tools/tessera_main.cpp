// tessera command line: run the full clustering pipeline, generate
// synthetic panels, or produce individual tables from saved pieces.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tessera/tessera.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;    // bad flags or configuration
constexpr int kExitData = 2;     // input data failed validation
constexpr int kExitNumeric = 3;  // degenerate or infeasible numerics

struct RunOptions {
    std::string config_path;
    std::optional<std::string> scenario;
    std::optional<std::string> out_dir;
    bool no_filter = false;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> seed;
};

int cmd_run(const RunOptions& opt) {
    auto kv = tessera::KeyValueFile::parse_file(opt.config_path);
    if (opt.scenario) kv.set("scenario", *opt.scenario);
    if (opt.out_dir) kv.set("out", *opt.out_dir);
    if (opt.no_filter) kv.set("filter", "off");
    if (opt.workers) kv.set("workers", std::to_string(*opt.workers));
    if (opt.seed) kv.set("seed", std::to_string(*opt.seed));

    auto config = tessera::PipelineConfig::from_kv(kv);
    {
        // Hash the config as found on disk; flag overrides do not change
        // the recorded source.
        std::ifstream in(opt.config_path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        config.source_hash = tessera::detail::fnv1a64(buf.str());
    }
    const auto summary = tessera::run_pipeline(config);
    std::cout << "run complete: " << summary.entities_before << " entities in, "
              << summary.entities_after << " retained, " << summary.output_files.size()
              << " files in " << config.out_dir << "\n";
    return kExitOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_path,
              std::optional<std::uint64_t> seed) {
    auto [spec, registry] = tessera::synth_spec_from_file(spec_path);
    if (seed) spec.seed = *seed;
    const auto data = tessera::synth_generate(spec, registry);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw tessera::DataError("cannot write dataset file '" + out_path + "'");
    tessera::write_dataset(data, out, tessera::DatasetSchema::identity(registry));
    std::cout << "wrote " << data.entity_count() << " entities x " << data.years().size()
              << " years to " << out_path << "\n";
    return kExitOk;
}

int cmd_stats(const std::string& config_path, std::optional<std::string> out_dir) {
    const auto config = tessera::PipelineConfig::from_file(config_path);
    const auto data = tessera::ingest_file(config.input_path, config.schema, config.registry);
    const auto records = tessera::average_panel(data, config.innovation_window,
                                                config.performance_window, config.registry);
    std::vector<std::pair<std::string, tessera::StatsSummary>> stats;
    for (const auto& var : data.variables()) {
        std::vector<double> col;
        for (const auto& rec : records) col.push_back(rec.at(var));
        stats.emplace_back(var, tessera::describe(col));
    }
    const auto table = tessera::render_stats_table(stats);
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        const auto base = std::filesystem::path(*out_dir);
        std::ofstream csv(base / "stats.csv", std::ios::binary);
        csv << tessera::to_delimited(table);
        std::ofstream md(base / "stats.md", std::ios::binary);
        md << tessera::to_markdown(table);
        std::cout << "wrote stats.csv and stats.md to " << *out_dir << "\n";
    } else {
        std::cout << tessera::to_markdown(table);
    }
    return kExitOk;
}

int cmd_crosstab(const std::string& a_path, const std::string& b_path,
                 const std::string& row_name, const std::string& col_name,
                 std::optional<std::string> out_dir, char delim) {
    const auto a = tessera::read_assignment_file(a_path, delim);
    const auto b = tessera::read_assignment_file(b_path, delim);
    const auto table = tessera::render_crosstab(tessera::crosstab(a, b), row_name, col_name);
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        const auto base = std::filesystem::path(*out_dir);
        std::ofstream csv(base / "crosstab.csv", std::ios::binary);
        csv << tessera::to_delimited(table);
        std::ofstream md(base / "crosstab.md", std::ios::binary);
        md << tessera::to_markdown(table);
        std::cout << "wrote crosstab.csv and crosstab.md to " << *out_dir << "\n";
    } else {
        std::cout << tessera::to_markdown(table);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tessera: fixed-centroid weighted Voronoi clustering for entity panels"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
    run->add_option("--config", run_opt.config_path, "pipeline config file")->required();
    std::string scenario_flag, out_flag;
    unsigned workers_flag = 0;
    std::uint64_t seed_flag = 0;
    auto* sopt = run->add_option("--scenario", scenario_flag, "I, II, III or custom");
    auto* oopt = run->add_option("--out", out_flag, "output directory");
    run->add_flag("--no-filter", run_opt.no_filter, "skip outlier filtering");
    auto* wopt = run->add_option("--workers", workers_flag, "worker thread count");
    auto* seopt = run->add_option("--seed", seed_flag, "seed recorded for this run");

    std::string synth_spec, synth_out;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic panel");
    synth->add_option("--spec", synth_spec, "synthetic spec file")->required();
    synth->add_option("--out", synth_out, "output dataset file")->required();
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "override the spec seed");

    std::string stats_config, stats_out;
    auto* stats = app.add_subcommand("stats", "descriptive statistics table only");
    stats->add_option("--config", stats_config, "pipeline config file")->required();
    auto* stats_out_opt = stats->add_option("--out", stats_out, "output directory");

    std::string ct_a, ct_b, ct_row = "A", ct_col = "B", ct_out, ct_delim = ",";
    auto* ct = app.add_subcommand("crosstab", "cross-tabulate two saved assignments");
    ct->add_option("--a", ct_a, "first assignment file (rows)")->required();
    ct->add_option("--b", ct_b, "second assignment file (columns)")->required();
    ct->add_option("--row-name", ct_row, "row clustering label");
    ct->add_option("--col-name", ct_col, "column clustering label");
    ct->add_option("--delimiter", ct_delim, "assignment file delimiter (comma, tab, ...)");
    auto* ct_out_opt = ct->add_option("--out", ct_out, "output directory");

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            if (*sopt) run_opt.scenario = scenario_flag;
            if (*oopt) run_opt.out_dir = out_flag;
            if (*wopt) run_opt.workers = workers_flag;
            if (*seopt) run_opt.seed = seed_flag;
            return cmd_run(run_opt);
        }
        if (synth->parsed())
            return cmd_synth(synth_spec, synth_out,
                             *synth_seed_opt ? std::optional<std::uint64_t>(synth_seed)
                                             : std::nullopt);
        if (stats->parsed())
            return cmd_stats(stats_config, *stats_out_opt ? std::optional<std::string>(stats_out)
                                                          : std::nullopt);
        if (ct->parsed())
            return cmd_crosstab(ct_a, ct_b, ct_row, ct_col,
                                *ct_out_opt ? std::optional<std::string>(ct_out) : std::nullopt,
                                tessera::detail::parse_delimiter(ct_delim));
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const tessera::ConfigError& e) {
        std::cerr << "tessera: config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tessera::DataError& e) {
        std::cerr << "tessera: data: " << e.what() << "\n";
        return kExitData;
    } catch (const tessera::NumericError& e) {
        std::cerr << "tessera: numeric: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "tessera: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "tessera: " << e.what() << "\n";
        return kExitNumeric;
    }
}
