#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hlmpc/config.hpp"
#include "hlmpc/oracle.hpp"
#include "hlmpc/outputs.hpp"

namespace {

struct RunArgs {
    std::string config;
    std::optional<int> iterations;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> improver;
    std::optional<int> horizon_high;
    std::optional<int> horizon_low;
    std::optional<int> shoot_budget;
    bool dump_learning = false;
};

int run_command(const RunArgs& a) {
    auto cfg = hlmpc::load_config(a.config);
    if (a.iterations) cfg.run.iterations = *a.iterations;
    if (a.seed) cfg.controller.seed = *a.seed;
    if (a.out_dir) cfg.run.out_dir = *a.out_dir;
    if (a.improver) cfg.controller.improver = *a.improver == "on";
    if (a.horizon_high) cfg.controller.horizon_high = *a.horizon_high;
    if (a.horizon_low) cfg.controller.horizon_low = *a.horizon_low;
    if (a.shoot_budget) cfg.controller.shoot_budget = *a.shoot_budget;
    if (cfg.run.iterations < 0) throw hlmpc::ConfigError("--iterations must be >= 0");

    hlmpc::Orchestrator orch(cfg.graph.build(), cfg.dynamics, cfg.controller);
    orch.initialize();
    for (int r = 0; r < cfg.run.iterations; ++r) orch.run_iteration();
    hlmpc::emit_outputs(orch, cfg.run.out_dir, a.dump_learning);

    for (const auto& m : orch.state().metrics)
        std::printf("iteration %d: tasks %d, soc %.6f, time %.1f\n", m.iteration, m.tasks, m.total_soc, m.total_time);
    return 0;
}

int oracle_command(const std::string& config, int iterations) {
    auto cfg = hlmpc::load_config(config);
    hlmpc::Orchestrator orch(cfg.graph.build(), cfg.dynamics, cfg.controller);
    orch.initialize();
    for (int r = 0; r < iterations; ++r) orch.run_iteration();
    auto route = hlmpc::brute_force_route(orch.graph(), orch.state().learning.theta, cfg.dynamics.capacity_limits);
    std::printf("tasks %d route", route.tasks);
    for (auto n : route.nodes) std::printf(" %d", n);
    std::printf("\nfinal soc %.9f time %.9f\n", route.caps.back()[hlmpc::kSoc], route.caps.back()[hlmpc::kTime]);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical learning MPC for a capacity-constrained agent on a task graph"};
    app.require_subcommand(1);

    RunArgs args;
    auto* run = app.add_subcommand("run", "run the iterative controller and write outputs");
    run->add_option("--config", args.config, "config JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--iterations", args.iterations, "number of iterations after initialization");
    run->add_option("--seed", args.seed, "seed for the low-level random shooting");
    run->add_option("--out-dir", args.out_dir, "output directory");
    run->add_option("--improver", args.improver, "on|off")->check(CLI::IsMember({"on", "off"}));
    run->add_option("--horizon-high", args.horizon_high, "high-level horizon");
    run->add_option("--horizon-low", args.horizon_low, "low-level horizon");
    run->add_option("--shoot-budget", args.shoot_budget, "random shooting samples per solve");
    run->add_flag("--dump-learning", args.dump_learning, "write safe-set dumps per iteration");

    std::string oracle_config;
    int oracle_iterations = 0;
    auto* oracle = app.add_subcommand("oracle-route", "brute-force best route under the learned estimate");
    oracle->group("");
    oracle->add_option("--config", oracle_config, "config JSON file")->required()->check(CLI::ExistingFile);
    oracle->add_option("--iterations", oracle_iterations, "iterations to run before querying");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return run_command(args);
        return oracle_command(oracle_config, oracle_iterations);
    } catch (const hlmpc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const hlmpc::InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
