#pragma once

#include <map>
#include <optional>
#include <vector>

#include "hlmpc/task_graph.hpp"
#include "hlmpc/trajectory_store.hpp"

namespace hlmpc {

/// Per-edge smallest observed capacity depletion.
struct ThetaEstimate {
    std::map<Edge, Capacity> values;
    int iteration = 0;

    bool has(const Edge& e) const { return values.count(e) != 0; }
    const Capacity& at(const Edge& e) const;
};

/// The box [0, theta_hat] per edge.
struct ThetaBound {
    ThetaEstimate upper;

    bool contains(const Edge& e, const Capacity& theta) const;
    bool subset_of(const ThetaBound& other) const;
};

/// Minimum over `prior` and every traversal in `records`; every edge in `edges` must end up covered.
ThetaEstimate update_theta(const std::vector<IterationRecord>& records, const ThetaEstimate& prior,
                           const std::vector<Edge>& edges, int iteration);

ThetaBound update_theta_bound(const ThetaEstimate& theta);

/// Thrown when a node sequence cannot be completed within the limits under theta.
class InfeasibleRouteError : public InvariantError {
public:
    using InvariantError::InvariantError;
};

/// Capacity ceilings per event: last = limits, first = 0, and c_k = c_{k+1} - theta(n_k, n_{k+1}) in between.
std::vector<Capacity> backpropagate_capacities(const std::vector<NodeId>& nodes, const ThetaEstimate& theta,
                                               const Capacity& limits);

struct HighSafeSetEntry {
    int source_iteration = 0;
    int event_index = 0;
    NodeId node = 0;
    Capacity cap_ceiling{};
    std::vector<NodeId> suffix_nodes;  ///< nodes after this event, in visiting order, ending at the depot
    int suffix_task_count = 0;
    int next_entry = -1;  ///< index of event k+1 of the same iteration, -1 at the end

    bool suffix_contains(NodeId n) const;
};

/// Union over p of the ceilings of iteration p computed with theta_history[p] (the estimate formed after p).
std::vector<HighSafeSetEntry> build_high_safe_set(const std::vector<IterationRecord>& records,
                                                  const std::vector<ThetaEstimate>& theta_history,
                                                  const Capacity& limits, NodeId depot);

/// Best suffix count among entries with exactly this node and ceiling; nullopt stands for minus infinity.
std::optional<int> q_high(const std::vector<HighSafeSetEntry>& entries, NodeId node, const Capacity& cap_ceiling);

/// Walks each entry's suffix from its ceiling with `theta`; returns a description of every failure.
std::vector<std::string> safe_set_soundness(const std::vector<HighSafeSetEntry>& entries, const ThetaEstimate& theta,
                                            const Capacity& limits, NodeId depot);

struct StoredEdgeTrajectory {
    Edge edge{};
    int source_iteration = 0;  ///< -1 for the initialization trajectories
    std::vector<AgentState> states;  ///< capacities shifted to start at 0
    std::vector<ControlInput> inputs;
    std::vector<int> cost_to_go;  ///< Q^L per state

    std::size_t length() const { return inputs.size(); }
};

using LowSafeSet = std::map<Edge, StoredEdgeTrajectory>;

/// Indicator stage cost: 0 inside the target region, 1 elsewhere.
int stage_cost(const NodeAnchor& target, const AgentState& x, const Capacity& limits);

StoredEdgeTrajectory make_stored_trajectory(const Edge& edge, const std::vector<AgentState>& states,
                                            const std::vector<ControlInput>& inputs, const NodeAnchor& target,
                                            const Capacity& limits, int source_iteration);

LowSafeSet update_low_safe_set(LowSafeSet store, const IterationRecord& rec, const TaskGraph& graph,
                               const Capacity& limits);

struct LearningStore {
    ThetaEstimate theta;
    std::vector<ThetaEstimate> theta_history;  ///< [p] = estimate formed after iteration p
    ThetaBound bound;
    std::vector<HighSafeSetEntry> high_safe_set;
    LowSafeSet low_safe_set;
};

}  // namespace hlmpc
