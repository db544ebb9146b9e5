#pragma once

#include <cstdint>
#include <vector>

#include "hlmpc/learning.hpp"

namespace hlmpc {

struct LowLevelOptions {
    int horizon = 15;
    bool improver = true;
    int shoot_budget = 8;
    std::uint64_t seed = 0;
};

enum class CandidateSource { Fallback, Retimed, Shooting };

struct LowLevelSolution {
    std::vector<ControlInput> inputs;   ///< planned horizon, at most LowLevelOptions::horizon long
    std::vector<AgentState> predicted;  ///< inputs.size() + 1 states starting at the current state
    std::size_t terminal_match = 0;     ///< stored index matched by the predicted terminal
    int cost = 0;                       ///< stage-cost sum over the horizon + Q^L(terminal_match)
    std::vector<ControlInput> tail;     ///< stored inputs from terminal_match to the stored arrival
    bool terminal_in_region = false;
    bool exact_replay = false;  ///< built only from stored inputs, so the terminal matches bit-for-bit
    CandidateSource source = CandidateSource::Fallback;
    int candidate_index = 0;
};

struct EdgeContext {
    const DynamicsConfig& cfg;
    Edge edge;
    NodeAnchor target;
    const StoredEdgeTrajectory& stored;
};

/// Best of the shifted fallback and the improver candidates. `previous` is the
/// solution applied one step earlier on this edge, or null at edge entry.
LowLevelSolution solve_low_level(const AgentState& x, const EdgeContext& ctx, const Capacity& edge_start_caps,
                                 std::size_t elapsed_steps, const LowLevelOptions& opt,
                                 const LowLevelSolution* previous);

ControlInput tail_policy(const LowLevelSolution& sol, std::size_t steps_since_t_star);

struct EdgeRun {
    Edge edge{};
    std::vector<AgentState> states;
    std::vector<ControlInput> inputs;
    int solves = 0;
    int improved_solves = 0;
};

/// Closed loop from the anchor of edge.from until the first state inside the region of edge.to.
EdgeRun track_edge(const AgentState& x0, const Edge& edge, const TaskGraph& graph, const LearningStore& store,
                   const DynamicsConfig& cfg, const LowLevelOptions& opt);

}  // namespace hlmpc
