#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#ifndef TESSERA_CLI_PATH
#error "TESSERA_CLI_PATH must point at the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("tessera_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(TESSERA_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

const char* kSynthSpec =
    "entity_count = 62\n"
    "seed = 1\n"
    "synth.TIAX.mean = 12360.46\nsynth.TIAX.std = 18695.11\n"
    "synth.TTA.mean = 29215.40\nsynth.TTA.std = 45379.80\n"
    "synth.DSal.mean = 0.06\nsynth.DSal.std = 0.14\n"
    "synth.DAss.mean = 0.09\nsynth.DAss.std = 0.16\n"
    "synth.DLab.mean = 0.06\nsynth.DLab.std = 0.14\n"
    "synth.ROI.mean = 0.05\nsynth.ROI.std = 0.05\n"
    "synth.ROS.mean = 0.05\nsynth.ROS.std = 0.07\n"
    "synth.ATO.mean = 0.91\nsynth.ATO.std = 0.34\n"
    "synth.S/E.mean = 275.77\nsynth.S/E.std = 231.20\n";

std::string run_config(const fs::path& input, const fs::path& out) {
    return "input = " + input.string() + "\nout = " + out.string() + "\nscenario = II\n";
}

} // namespace

TEST_CASE("synth is reproducible and shaped as promised") {
    const auto dir = fresh_dir("synth");
    write_file(dir / "spec.kv", kSynthSpec);
    CHECK(run_cli("synth --spec " + (dir / "spec.kv").string() + " --out " +
                      (dir / "a.csv").string(),
                  dir / "log1.txt") == 0);
    CHECK(run_cli("synth --spec " + (dir / "spec.kv").string() + " --out " +
                      (dir / "b.csv").string(),
                  dir / "log2.txt") == 0);
    const auto a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    // header + 62 entities x 5 years
    CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 62 * 5);
}

TEST_CASE("run completes and writes its reports") {
    const auto dir = fresh_dir("run");
    write_file(dir / "spec.kv", kSynthSpec);
    REQUIRE(run_cli("synth --spec " + (dir / "spec.kv").string() + " --out " +
                        (dir / "data.csv").string(),
                    dir / "log1.txt") == 0);
    write_file(dir / "run.kv", run_config(dir / "data.csv", dir / "out"));
    CHECK(run_cli("run --config " + (dir / "run.kv").string(), dir / "log2.txt") == 0);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    CHECK(fs::exists(dir / "out" / "crosstab.md"));
}

TEST_CASE("usage problems exit with code 1") {
    const auto dir = fresh_dir("usage");
    CHECK(run_cli("run", dir / "log1.txt") == 1);                       // missing --config
    CHECK(run_cli("frobnicate", dir / "log2.txt") == 1);                // unknown subcommand
    CHECK(run_cli("run --config /nonexistent.kv", dir / "log3.txt") == 1);
}

TEST_CASE("data validation problems exit with code 2") {
    const auto dir = fresh_dir("data");
    write_file(dir / "empty.csv", "");
    write_file(dir / "run.kv", run_config(dir / "empty.csv", dir / "out"));
    CHECK(run_cli("run --config " + (dir / "run.kv").string(), dir / "log.txt") == 2);
    CHECK(slurp(dir / "log.txt").find("data:") != std::string::npos);
}

TEST_CASE("degenerate numerics exit with code 3") {
    const auto dir = fresh_dir("numeric");
    // a constant variable cannot be range-scaled
    std::string csv = "entity,year,TIAX,TTA,DSal,DAss,DLab,ROI,ROS,ATO,S/E\n";
    for (int e = 0; e < 4; ++e)
        for (int y = 2006; y <= 2010; ++y)
            csv += "e" + std::to_string(e) + "," + std::to_string(y) + ",5.0," +
                   std::to_string(e + y * 0.25) + ",0.1,0.2,0.3,0.04,0.05,0.9,100.0\n";
    write_file(dir / "const.csv", csv);
    write_file(dir / "run.kv",
               run_config(dir / "const.csv", dir / "out") + "filter = off\n");
    CHECK(run_cli("run --config " + (dir / "run.kv").string(), dir / "log.txt") == 3);
    CHECK(slurp(dir / "log.txt").find("TIAX") != std::string::npos);
}

TEST_CASE("stats subcommand prints a markdown table") {
    const auto dir = fresh_dir("stats");
    write_file(dir / "spec.kv", kSynthSpec);
    REQUIRE(run_cli("synth --spec " + (dir / "spec.kv").string() + " --out " +
                        (dir / "data.csv").string(),
                    dir / "log1.txt") == 0);
    write_file(dir / "run.kv", run_config(dir / "data.csv", dir / "out"));
    CHECK(run_cli("stats --config " + (dir / "run.kv").string(), dir / "stats.txt") == 0);
    const auto out = slurp(dir / "stats.txt");
    CHECK(out.find("| mean |") != std::string::npos);
    CHECK(out.find("TIAX") != std::string::npos);
}

TEST_CASE("crosstab subcommand consumes saved assignments") {
    const auto dir = fresh_dir("crosstab");
    write_file(dir / "a.csv",
               "# cells=2\nentity,cell,tie\np,1,0\nq,1,0\nr,2,0\n");
    write_file(dir / "b.csv",
               "# cells=2\nentity,cell,tie\np,1,0\nq,2,0\nr,2,0\n");
    CHECK(run_cli("crosstab --a " + (dir / "a.csv").string() + " --b " +
                      (dir / "b.csv").string() + " --row-name inn --col-name perf",
                  dir / "out.txt") == 0);
    const auto out = slurp(dir / "out.txt");
    CHECK(out.find("| inn 1 | 1 | 1 | 2 |") != std::string::npos);
    CHECK(out.find("| Tot | 1 | 2 | 3 |") != std::string::npos);
}

TEST_CASE("run is byte-identical across invocations") {
    const auto dir = fresh_dir("repeat");
    write_file(dir / "spec.kv", kSynthSpec);
    REQUIRE(run_cli("synth --spec " + (dir / "spec.kv").string() + " --out " +
                        (dir / "data.csv").string(),
                    dir / "log0.txt") == 0);
    write_file(dir / "run.kv", run_config(dir / "data.csv", dir / "out1"));
    CHECK(run_cli("run --config " + (dir / "run.kv").string(), dir / "log1.txt") == 0);
    CHECK(run_cli("run --config " + (dir / "run.kv").string() + " --out " +
                      (dir / "out2").string(),
                  dir / "log2.txt") == 0);
    for (const auto& entry : fs::directory_iterator(dir / "out1")) {
        const auto name = entry.path().filename();
        CHECK(slurp(dir / "out1" / name) == slurp(dir / "out2" / name));
    }
}
