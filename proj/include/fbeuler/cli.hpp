#pragma once

#include <optional>
#include <string>

namespace fbeuler {

/// Options shared by the CLI subcommands. Exit codes are a stable contract:
/// 0 completed / all checks pass, 1 error, 2 monitored event termination.
struct RunConfig {
    std::string scenario_path;
    std::string output_dir = "run";
    bool force = false;

    // scenario overrides
    std::optional<double> dt;
    std::optional<double> h;
    std::optional<double> t_end;
    std::optional<double> k_max;
    std::optional<double> taylor_min;
    std::optional<double> quality_floor;

    double tolerance = 0.05;        // verify: Bernstein band
    std::string corpus = "default"; // verify: default | dumbbell
    int subdiv = 4;                 // oracle: mesh refinement
    unsigned seed = 42;
    bool list_only = false;
    bool export_fields = false;  // run: also write fields_<step>.csv snapshots
};

int cmd_run(const RunConfig& config);
int cmd_verify(const RunConfig& config);
int cmd_oracle(const RunConfig& config);
int cmd_report(const RunConfig& config);

} // namespace fbeuler
