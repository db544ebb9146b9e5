/**
 * @file oracle.hpp
 * @brief Brute-force and closed-form references used to check the controllers.
 */
#pragma once

#include <set>
#include <string>
#include <vector>

#include "hlmpc/high_level_controller.hpp"

namespace hlmpc {

struct OracleRoute {
    std::vector<NodeId> nodes;  ///< depot ... depot; just {depot} when nothing is affordable
    std::vector<Capacity> caps;
    int tasks = 0;
};

inline constexpr int kOracleMaxNodes = 8;

/**
 * Exhaustive search for the depot-to-depot route visiting the most distinct nodes
 * with theta-cost inside the limits.
 *
 * Admissible routes (identical to the planner's): every step follows a graph edge;
 * non-depot nodes appear at most once; the depot appears only at both ends.
 * Ties go to the lexicographically smallest node sequence. Refuses graphs with more
 * than kOracleMaxNodes nodes.
 */
OracleRoute brute_force_route(const TaskGraph& graph, const ThetaEstimate& theta, const Capacity& limits);

/// Forward check of backward-propagated ceilings: each suffix started at its ceiling
/// stays within the limits and ends exactly at them.
bool validate_alg2(const std::vector<NodeId>& nodes, const ThetaEstimate& theta, const Capacity& limits,
                   const std::vector<Capacity>& ceilings);

/// Closed form after t steps of input (0, a) from z = y = theta = 0, capacities 0.
AgentState straight_line_state(const DynamicsConfig& cfg, double v0, double a, int t);

/// Independent re-check of every high-level constraint; returns the list of violations.
std::vector<std::string> validate_plan(const HighLevelPlan& plan, const HighLevelState& state,
                                       const std::set<NodeId>& visited, const PlannerInputs& in, int horizon);

}  // namespace hlmpc
