#include <CLI11.hpp>

#include "fbeuler/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"free-boundary incompressible Euler laboratory"};
    app.require_subcommand(1);

    fbeuler::RunConfig config;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--output", config.output_dir, "output directory");
        cmd->add_option("--seed", config.seed, "seed for randomized corpora");
    };

    CLI::App* run = app.add_subcommand("run", "evolve a scenario and emit diagnostics");
    run->add_option("scenario", config.scenario_path, "scenario JSON file")->required();
    run->add_flag("--force", config.force, "overwrite an existing run directory");
    double dt = 0, h = 0, t_end = 0, k_max = 0, taylor_min = 0, quality_floor = 0;
    run->add_option("--dt", dt, "override time step");
    run->add_option("--grid-h", h, "override grid spacing");
    run->add_option("--t-end", t_end, "override end time");
    run->add_option("--k-max", k_max, "override the K event threshold");
    run->add_option("--taylor-min", taylor_min, "override the Taylor-sign event threshold");
    run->add_option("--quality-floor", quality_floor, "override the mesh quality floor");
    run->add_flag("--fields", config.export_fields, "export field snapshots as CSV");
    add_common(run);

    CLI::App* verify = app.add_subcommand("verify", "inequality suite over the analytic corpus");
    verify->add_option("--tolerance", config.tolerance, "Bernstein tolerance band");
    verify->add_option("--corpus", config.corpus, "corpus name (default | dumbbell)");
    add_common(verify);

    CLI::App* oracle = app.add_subcommand("oracle", "potential-theory and solver oracles");
    oracle->add_option("--subdiv", config.subdiv, "icosphere subdivision level");
    oracle->add_flag("--list", config.list_only, "print the test inventory and exit");
    add_common(oracle);

    CLI::App* report = app.add_subcommand("report", "summarize an existing run directory");
    add_common(report);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (run->count("--dt")) config.dt = dt;
        if (run->count("--grid-h")) config.h = h;
        if (run->count("--t-end")) config.t_end = t_end;
        if (run->count("--k-max")) config.k_max = k_max;
        if (run->count("--taylor-min")) config.taylor_min = taylor_min;
        if (run->count("--quality-floor")) config.quality_floor = quality_floor;
        return fbeuler::cmd_run(config);
    }
    if (verify->parsed()) return fbeuler::cmd_verify(config);
    if (oracle->parsed()) return fbeuler::cmd_oracle(config);
    if (report->parsed()) return fbeuler::cmd_report(config);
    return 1;
}
