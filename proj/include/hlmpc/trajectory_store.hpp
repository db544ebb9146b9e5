#pragma once

#include <optional>
#include <vector>

#include "hlmpc/agent_dynamics.hpp"
#include "hlmpc/task_graph.hpp"

namespace hlmpc {

struct Event {
    int k = 0;
    std::size_t time = 0;  ///< index into IterationRecord::states
    NodeId node = 0;

    bool operator==(const Event&) const = default;
};

struct IterationRecord {
    int iteration = 0;
    std::vector<AgentState> states;
    std::vector<ControlInput> inputs;
    std::vector<Event> events;
    bool complete = false;

    std::vector<NodeId> node_sequence() const;
};

struct HighLevelState {
    NodeId node = 0;
    Capacity c{};

    bool operator==(const HighLevelState&) const = default;
};

struct TimeRange {
    std::size_t t0 = 0;
    std::size_t tf = 0;

    bool operator==(const TimeRange&) const = default;
};

/// First traversal of (i, j): consecutive events at i then j.
std::optional<TimeRange> index_range(const IterationRecord& rec, NodeId i, NodeId j);

/// Every traversal of (i, j) in time order.
std::vector<TimeRange> all_index_ranges(const IterationRecord& rec, NodeId i, NodeId j);

/// c_l(tf) - c_l(t0) over the first traversal.
std::optional<double> omega(const IterationRecord& rec, NodeId i, NodeId j, std::size_t l);

/// Capacity change of each traversal of (i, j).
std::vector<Capacity> omega_all(const IterationRecord& rec, NodeId i, NodeId j);

/// g: the node whose region contains x, paired with c(x).
HighLevelState abstract(const AgentState& x, const TaskGraph& graph, const Capacity& limits);

/// g_tau: one high-level state per event.
std::vector<HighLevelState> abstract_trajectory(const IterationRecord& rec);

/// Unique non-depot nodes.
int count_tasks(const std::vector<HighLevelState>& hl, NodeId depot);
int count_tasks(const IterationRecord& rec, NodeId depot);

/// One traversal sliced out of a record.
struct EdgeTraversal {
    Edge edge{};
    TimeRange range{};
    std::vector<AgentState> states;
    std::vector<ControlInput> inputs;
};

std::vector<EdgeTraversal> traversals(const IterationRecord& rec);

}  // namespace hlmpc
