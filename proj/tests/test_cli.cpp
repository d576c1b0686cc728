#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fbeuler/cli.hpp"
#include "fbeuler/diagnostics.hpp"
#include "fbeuler/scenario_io.hpp"

using namespace fbeuler;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("fbeuler_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string scenario_text(const std::string& velocity_kind, const std::string& params,
                          double t_end, double taylor_min) {
    return R"({
  "schema": 1,
  "name": "test scenario",
  "surface": {"kind": "sphere", "params": {"radius": 1.0}},
  "velocity": {"kind": ")" + velocity_kind + R"(", "params": )" + params + R"(},
  "grid": {"h": 0.05},
  "bem": {"subdiv": 3},
  "time": {"dt": 0.01, "t_end": )" + std::to_string(t_end) + R"(, "snapshot_every": 5},
  "events": {"K_max": 1e15, "taylor_min": )" + std::to_string(taylor_min) + R"(, "quality_floor": 0.15}
})";
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p);
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("parse_scenario: round trip of every velocity kind, fail-closed keys") {
    Scenario s = parse_scenario(scenario_text("rigid_rotation", R"({"omega": [0,0,1]})", 0.1, 0.0));
    CHECK(s.velocity.kind == VelocitySpec::Kind::RigidRotation);
    CHECK(s.h == 0.05);
    CHECK(s.events.taylor_min == 0.0);
    CHECK(s.seed == 42);  // default

    CHECK_THROWS_AS(parse_scenario("{\"schema\": 2}"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("not json"), ConfigError);

    // unknown key anywhere is an error
    std::string txt = scenario_text("zero", "{}", 0.1, -1.0);
    txt.insert(txt.rfind('}'), R"(, "extra": 1)");
    CHECK_THROWS_AS(parse_scenario(txt), ConfigError);

    std::string bad_vel = scenario_text("rigid_rotation", R"({"omega": [0,0,1], "x": 2})", 0.1, -1.0);
    CHECK_THROWS_AS(parse_scenario(bad_vel), ConfigError);
}

TEST_CASE("cmd_run: missing scenario file exits 1") {
    RunConfig cfg;
    cfg.scenario_path = "/nonexistent/scenario.json";
    cfg.output_dir = (temp_dir("missing") / "out").string();
    CHECK(cmd_run(cfg) == 1);
}

TEST_CASE("cmd_run + cmd_report: zero-velocity scenario completes") {
    fs::path dir = temp_dir("zero");
    fs::path scen = dir / "zero.json";
    {
        std::ofstream os(scen);
        os << scenario_text("zero", "{}", 0.1, -1e15);
    }
    RunConfig cfg;
    cfg.scenario_path = scen.string();
    cfg.output_dir = (dir / "out").string();
    CHECK(cmd_run(cfg) == 0);

    auto records = read_diagnostics_csv((dir / "out" / "diagnostics.csv").string());
    CHECK(records.size() == 11);
    CHECK(fs::exists(dir / "out" / "summary.json"));
    CHECK(fs::exists(dir / "out" / "mesh_0.off"));
    CHECK(fs::exists(dir / "out" / "mesh_10.off"));

    nlohmann::json summary = nlohmann::json::parse(read_file(dir / "out" / "summary.json"));
    CHECK(summary["termination"] == "completed");
    CHECK(std::abs(summary["breakdown_integral"].get<double>()) < 1e-12);

    // rerun without --force refuses, with --force succeeds
    CHECK(cmd_run(cfg) == 1);
    cfg.force = true;
    CHECK(cmd_run(cfg) == 0);

    // report: byte-identical diagnostics.csv before and after
    std::string before = read_file(dir / "out" / "diagnostics.csv");
    RunConfig rep;
    rep.output_dir = (dir / "out").string();
    CHECK(cmd_report(rep) == 0);
    CHECK(read_file(dir / "out" / "diagnostics.csv") == before);
    std::string series = read_file(dir / "out" / "series.csv");
    CHECK(series.rfind("t,metric,value\n", 0) == 0);
    // 19 metrics x 11 records + header
    CHECK(std::count(series.begin(), series.end(), '\n') == 19 * 11 + 1);

    fs::remove_all(dir);
}

TEST_CASE("cmd_run: rotation fires the Taylor-sign event with exit 2") {
    fs::path dir = temp_dir("rot");
    fs::path scen = dir / "rot.json";
    {
        std::ofstream os(scen);
        os << scenario_text("rigid_rotation", R"({"omega": [0,0,1]})", 0.5, 0.0);
    }
    RunConfig cfg;
    cfg.scenario_path = scen.string();
    cfg.output_dir = (dir / "out").string();
    CHECK(cmd_run(cfg) == 2);
    nlohmann::json summary = nlohmann::json::parse(read_file(dir / "out" / "summary.json"));
    CHECK(summary["termination"] == "taylor_sign");
    auto records = read_diagnostics_csv((dir / "out" / "diagnostics.csv").string());
    REQUIRE(records.size() == 1);
    CHECK(records[0].taylor_margin == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
    fs::remove_all(dir);
}

TEST_CASE("cmd_report: corrupt diagnostics row is reported with its number") {
    fs::path dir = temp_dir("corrupt");
    {
        std::ofstream os(dir / "diagnostics.csv");
        os << kDiagnosticsCsvHeader << "\n";
        os << "bad,row\n";
    }
    RunConfig cfg;
    cfg.output_dir = dir.string();
    CHECK(cmd_report(cfg) == 1);
    fs::remove_all(dir);

    RunConfig missing;
    missing.output_dir = "/nonexistent/run";
    CHECK(cmd_report(missing) == 1);
}

TEST_CASE("cmd_oracle: --list prints the inventory") {
    RunConfig cfg;
    cfg.list_only = true;
    CHECK(cmd_oracle(cfg) == 0);
}

#ifdef FBEULER_CLI_PATH
TEST_CASE("binary: argv parsing and exit codes through the real executable") {
    fs::path dir = temp_dir("spawn");
    fs::path scen = dir / "zero.json";
    {
        std::ofstream os(scen);
        os << scenario_text("zero", "{}", 0.05, -1e15);
    }
    std::string base = std::string(FBEULER_CLI_PATH);
    std::string cmd = base + " run " + scen.string() + " --output " + (dir / "out").string() +
                      " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 0);

    cmd = base + " report --output " + (dir / "out").string() + " > /dev/null 2>&1";
    rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 0);

    cmd = base + " bogus > /dev/null 2>&1";
    rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) != 0);
    fs::remove_all(dir);
}
#endif
