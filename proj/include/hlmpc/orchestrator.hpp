#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "hlmpc/high_level_controller.hpp"
#include "hlmpc/low_level_controller.hpp"

namespace hlmpc {

struct ControllerOptions {
    int horizon_high = 3;
    int horizon_low = 15;
    bool improver = true;  ///< off: both levels only replay their fallback candidates
    int shoot_budget = 8;
    std::uint64_t seed = 0;
};

struct PlanTrace {
    int k = 0;
    HighLevelState at{};
    HighLevelPlan plan;
    int fallback_objective = -1;  ///< -1 at event 0
};

struct IterationMetrics {
    int iteration = 0;
    int tasks = 0;
    double total_soc = 0.0;
    double total_time = 0.0;
    int low_level_solves = 0;
    int improved_solves = 0;
};

struct RunState {
    int iteration = 0;  ///< index of the next iteration to run
    HighLevelPlan current_plan;
    std::set<NodeId> visited;
    std::vector<IterationRecord> archive;
    LearningStore learning;
    std::uint64_t rng_seed = 0;

    std::vector<std::vector<PlanTrace>> plan_traces;  ///< per archived iteration
    std::vector<IterationMetrics> metrics;            ///< per archived iteration
    LowSafeSet initial_trajectories;                  ///< conservative per-edge trajectories
};

/// Greedy initial route: nearest affordable unvisited neighbour while a return to the depot stays affordable.
std::vector<NodeId> greedy_initial_route(const TaskGraph& graph, const ThetaEstimate& theta, const Capacity& limits);

class Orchestrator {
public:
    Orchestrator(TaskGraph graph, DynamicsConfig dynamics, ControllerOptions options);

    /// Conservative per-edge trajectories, iteration 0 and the first learning state.
    void initialize();

    /// One depot-to-depot iteration followed by the learning updates.
    const IterationRecord& run_iteration();

    void run(int iterations);

    const RunState& state() const { return state_; }
    const TaskGraph& graph() const { return graph_; }
    const DynamicsConfig& dynamics() const { return dynamics_; }
    const ControllerOptions& options() const { return options_; }

private:
    IterationRecord execute_iteration(std::vector<PlanTrace>& trace, IterationMetrics& metrics);
    void update_learning(const IterationRecord& rec);
    void check_plan(const HighLevelPlan& plan, const HighLevelState& at) const;
    PlannerInputs planner_inputs() const;
    AgentState start_state() const;

    TaskGraph graph_;
    DynamicsConfig dynamics_;
    ControllerOptions options_;
    RunState state_;
    bool initialized_ = false;
};

}  // namespace hlmpc
