#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tessera/clustering.hpp"
#include "tessera/dataset.hpp"
#include "tessera/detail/csv.hpp"
#include "tessera/error.hpp"
#include "tessera/outlier.hpp"
#include "tessera/synth.hpp"
#include "tessera/variables.hpp"
#include "tessera/weights.hpp"

namespace tessera {

/// Ordered `key = value` text. Lines starting with # and blank lines are
/// skipped; later keys override earlier ones.
class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& in) {
        KeyValueFile kv;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto t = detail::trim(line);
            if (t.empty() || t.front() == '#') continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + t + "'");
            kv.set(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
        }
        return kv;
    }

    static KeyValueFile parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    static KeyValueFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in);
    }

    void set(std::string key, std::string value) {
        if (key.empty()) throw ConfigError("empty config key");
        entries_.emplace_back(std::move(key), std::move(value));
    }

    bool has(const std::string& key) const { return get(key).has_value(); }

    std::optional<std::string> get(const std::string& key) const {
        std::optional<std::string> out;
        for (const auto& [k, v] : entries_)
            if (k == key) out = v;
        return out;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        const auto v = get(key);
        return v ? *v : fallback;
    }

    std::string require(const std::string& key) const {
        const auto v = get(key);
        if (!v) throw ConfigError("missing required config key '" + key + "'");
        return *v;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto v = get(key);
        if (!v) return fallback;
        double d = 0.0;
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), d);
        if (ec != std::errc() || p != v->data() + v->size())
            throw ConfigError("config key '" + key + "': '" + *v + "' is not a number");
        return d;
    }

    long long get_int(const std::string& key, long long fallback) const {
        const auto v = get(key);
        if (!v) return fallback;
        long long i = 0;
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), i);
        if (ec != std::errc() || p != v->data() + v->size())
            throw ConfigError("config key '" + key + "': '" + *v + "' is not an integer");
        return i;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "on" || *v == "yes" || *v == "1") return true;
        if (*v == "false" || *v == "off" || *v == "no" || *v == "0") return false;
        throw ConfigError("config key '" + key + "': '" + *v + "' is not a boolean");
    }

    /// All (suffix, value) pairs whose key starts with `prefix`, in file order.
    std::vector<std::pair<std::string, std::string>> with_prefix(const std::string& prefix) const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [k, v] : entries_)
            if (k.size() > prefix.size() && k.rfind(prefix, 0) == 0)
                out.emplace_back(k.substr(prefix.size()), v);
        return out;
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
        return entries_;
    }

    std::string serialize() const {
        std::string out;
        for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

namespace detail {

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        const auto t = trim(token);
        double d = 0.0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), d);
        if (ec != std::errc() || p != t.data() + t.size())
            throw ConfigError(what + ": '" + t + "' is not a number");
        out.push_back(d);
    }
    return out;
}

inline char parse_delimiter(const std::string& text) {
    if (text == "comma" || text == ",") return ',';
    if (text == "tab" || text == "\\t") return '\t';
    if (text == "semicolon" || text == ";") return ';';
    if (text.size() == 1) return text.front();
    throw ConfigError("unknown delimiter '" + text + "'");
}

} // namespace detail

/// The shipped nine-variable registry, extended by any
/// `registry.<NAME> = <group>` keys (group one of innovation, growth,
/// profitability, productivity).
inline VariableRegistry registry_from_kv(const KeyValueFile& kv) {
    std::vector<Variable> vars;
    for (const auto& v : VariableRegistry::standard()) vars.push_back(v);
    for (const auto& [name, group] : kv.with_prefix("registry."))
        vars.push_back({name, var_group_from_string(group)});
    return VariableRegistry(std::move(vars));
}

/// Reads the ingestion schema keys: entity_column, year_column, delimiter,
/// ignore (comma list) and one `variable.<NAME> = <column>` per mapped
/// column.
inline DatasetSchema schema_from_kv(const KeyValueFile& kv,
                                    const VariableRegistry& registry = VariableRegistry::standard()) {
    DatasetSchema s;
    s.entity_column = kv.get_or("entity_column", s.entity_column);
    s.year_column = kv.get_or("year_column", s.year_column);
    if (const auto d = kv.get("delimiter")) s.delimiter = detail::parse_delimiter(*d);
    for (const auto& [var, col] : kv.with_prefix("variable.")) {
        if (!registry.contains(var))
            throw ConfigError("schema maps unknown variable '" + var + "'");
        s.variable_columns.emplace_back(var, col);
    }
    if (const auto ig = kv.get("ignore")) {
        std::istringstream in(*ig);
        std::string token;
        while (std::getline(in, token, ','))
            s.ignore_columns.push_back(detail::trim(token));
    }
    if (s.variable_columns.empty()) {
        // No explicit mapping: identity columns for the whole registry.
        for (const auto& v : registry) s.variable_columns.emplace_back(v.name, v.name);
    }
    return s;
}

/// Reads scenario keys: scenario (I/II/III/custom), centroids (shared comma
/// list) or centroids.innovation / centroids.performance, tie_epsilon, and
/// for custom scenarios one alpha.<VAR> / beta.<VAR> weight per variable.
inline ScenarioConfig scenario_from_kv(const KeyValueFile& kv,
                                       const VariableRegistry& registry = VariableRegistry::standard()) {
    const auto id = scenario_from_string(kv.get_or("scenario", "II"));

    ScenarioConfig cfg = id == ScenarioId::custom ? ScenarioConfig{} : ScenarioConfig::preset(id, registry);
    cfg.id = id;

    if (const auto c = kv.get("centroids")) {
        const CentroidSet set(detail::parse_double_list(*c, "centroids"));
        cfg.innovation_centroids = set;
        cfg.performance_centroids = set;
    }
    if (const auto c = kv.get("centroids.innovation"))
        cfg.innovation_centroids = CentroidSet(detail::parse_double_list(*c, "centroids.innovation"));
    if (const auto c = kv.get("centroids.performance"))
        cfg.performance_centroids = CentroidSet(detail::parse_double_list(*c, "centroids.performance"));
    cfg.tie_epsilon = kv.get_double("tie_epsilon", 0.0);

    if (id == ScenarioId::custom) {
        auto build = [&](const char* prefix, const std::vector<std::string>& scope) {
            std::vector<double> weights(scope.size(), 0.0);
            std::vector<bool> seen(scope.size(), false);
            for (const auto& [var, value] : kv.with_prefix(prefix)) {
                const auto it = std::find(scope.begin(), scope.end(), var);
                if (it == scope.end())
                    throw ConfigError(std::string(prefix) + var + " is not in scope");
                const auto i = static_cast<std::size_t>(it - scope.begin());
                double d = 0.0;
                auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
                if (ec != std::errc() || p != value.data() + value.size())
                    throw ConfigError(std::string(prefix) + var + ": bad weight '" + value + "'");
                weights[i] = d;
                seen[i] = true;
            }
            for (std::size_t i = 0; i < scope.size(); ++i)
                if (!seen[i])
                    throw ConfigError("custom scenario: missing weight " + std::string(prefix) +
                                      scope[i]);
            try {
                return WeightScheme(scope, weights);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("custom scenario: ") + e.what());
            }
        };
        cfg.innovation_scheme = build("alpha.", registry.innovation_names());
        cfg.performance_scheme = build("beta.", registry.performance_names());
    }
    return cfg;
}

inline FilterPolicy filter_policy_from_kv(const KeyValueFile& kv) {
    FilterPolicy p;
    p.deviation_threshold = kv.get_double("filter.deviation_threshold", p.deviation_threshold);
    p.collapse_share = kv.get_double("filter.collapse_share", p.collapse_share);
    p.max_removal_fraction = kv.get_double("filter.max_removal_fraction", p.max_removal_fraction);
    if (const auto c = kv.get("filter.centroids"))
        p.centroids = CentroidSet(detail::parse_double_list(*c, "filter.centroids"));
    return p;
}

/// After filtering, either rescale with the retained sample's own extrema
/// (the default) or keep the pre-filter ranges.
enum class RenormalizeMode { retained, original };

/// Everything one `run` needs: input location and schema, averaging
/// windows, scenario, filter policy, output directory.
struct PipelineConfig {
    std::string input_path;
    VariableRegistry registry = VariableRegistry::standard();
    DatasetSchema schema;
    YearWindow innovation_window{2006, 2007};
    YearWindow performance_window{2008, 2010};
    bool allow_overlapping_windows = false;
    ScenarioConfig scenario = ScenarioConfig::preset(ScenarioId::uniform_value);
    bool filter_enabled = true;
    FilterPolicy filter;
    RenormalizeMode renormalize = RenormalizeMode::retained;
    std::string out_dir = "out";
    char output_delimiter = ',';
    unsigned workers = 1;
    std::uint64_t seed = 0;
    std::uint64_t source_hash = 0;  // hash of the config text this came from

    void validate() const {
        if (input_path.empty()) throw ConfigError("config: input path is required");
        if (!allow_overlapping_windows && innovation_window.overlaps(performance_window))
            throw ConfigError("config: averaging windows overlap (" +
                              innovation_window.to_string() + " vs " +
                              performance_window.to_string() +
                              "); set allow_overlapping_windows = true to permit this");
    }

    static PipelineConfig from_kv(const KeyValueFile& kv) {
        PipelineConfig cfg;
        cfg.input_path = kv.get_or("input", "");
        cfg.registry = registry_from_kv(kv);
        cfg.schema = schema_from_kv(kv, cfg.registry);
        if (const auto w = kv.get("innovation_window"))
            cfg.innovation_window = YearWindow::parse(*w);
        if (const auto w = kv.get("performance_window"))
            cfg.performance_window = YearWindow::parse(*w);
        cfg.allow_overlapping_windows = kv.get_bool("allow_overlapping_windows", false);
        cfg.scenario = scenario_from_kv(kv, cfg.registry);
        cfg.filter_enabled = kv.get_bool("filter", true);
        cfg.filter = filter_policy_from_kv(kv);
        const auto mode = kv.get_or("filter.renormalize", "retained");
        if (mode == "retained") cfg.renormalize = RenormalizeMode::retained;
        else if (mode == "original") cfg.renormalize = RenormalizeMode::original;
        else throw ConfigError("filter.renormalize must be 'retained' or 'original'");
        cfg.out_dir = kv.get_or("out", cfg.out_dir);
        if (const auto d = kv.get("output_delimiter"))
            cfg.output_delimiter = detail::parse_delimiter(*d);
        cfg.workers = static_cast<unsigned>(kv.get_int("workers", 1));
        cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));
        cfg.source_hash = detail::fnv1a64(kv.serialize());
        cfg.validate();
        return cfg;
    }

    static PipelineConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto text = buf.str();
        auto cfg = from_kv(KeyValueFile::parse_string(text));
        cfg.source_hash = detail::fnv1a64(text);
        return cfg;
    }
};

/// Reads a synthetic-dataset spec: entity_count, seed, windows,
/// moment_tolerance and per-variable `synth.<VAR>.mean/std/min/max` keys.
inline SynthSpec synth_spec_from_kv(const KeyValueFile& kv,
                                    const VariableRegistry& registry = VariableRegistry::standard()) {
    SynthSpec spec;
    spec.entity_count = static_cast<std::size_t>(kv.get_int("entity_count", 0));
    spec.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));
    if (const auto w = kv.get("innovation_window"))
        spec.innovation_window = YearWindow::parse(*w);
    if (const auto w = kv.get("performance_window"))
        spec.performance_window = YearWindow::parse(*w);
    spec.moment_tolerance = kv.get_double("moment_tolerance", spec.moment_tolerance);

    for (const auto& [suffix, value] : kv.with_prefix("synth.")) {
        const auto dot = suffix.rfind('.');
        if (dot == std::string::npos)
            throw ConfigError("bad synth key 'synth." + suffix +
                              "' (expected synth.<VAR>.<mean|std|min|max>)");
        const auto var = suffix.substr(0, dot);
        const auto field = suffix.substr(dot + 1);
        if (!registry.contains(var))
            throw ConfigError("synth spec references unknown variable '" + var + "'");
        double d = 0.0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
        if (ec != std::errc() || p != value.data() + value.size())
            throw ConfigError("synth." + suffix + ": '" + value + "' is not a number");
        auto& vs = spec.variables[var];
        if (field == "mean") vs.mean = d;
        else if (field == "std") vs.stddev = d;
        else if (field == "min") vs.lower = d;
        else if (field == "max") vs.upper = d;
        else throw ConfigError("bad synth field '" + field + "' in 'synth." + suffix + "'");
    }
    return spec;
}

/// Spec plus the registry it references (the shipped nine extended by any
/// registry.* keys in the same file).
inline std::pair<SynthSpec, VariableRegistry> synth_spec_from_file(const std::string& path) {
    const auto kv = KeyValueFile::parse_file(path);
    auto registry = registry_from_kv(kv);
    auto spec = synth_spec_from_kv(kv, registry);
    return {std::move(spec), std::move(registry)};
}

} // namespace tessera
