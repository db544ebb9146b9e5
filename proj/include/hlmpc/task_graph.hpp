#pragma once

#include <set>
#include <vector>

#include "hlmpc/types.hpp"

namespace hlmpc {

struct NodeSpec {
    NodeId id = 0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
};

/// Per-dimension half-widths of a node region.
struct NodeTolerance {
    double position = 0.05;
    double heading = 0.05;
    double velocity = 0.05;
};

struct NodeAnchor {
    NodeId node = 0;
    NonCapacityState anchor_chi{};
    NodeTolerance tolerance{};
};

/// Directed task graph with anchor poses. Immutable once built.
class TaskGraph {
public:
    /// Validates everything and throws ConfigError listing all problems at once.
    static TaskGraph create(std::vector<NodeSpec> nodes, std::vector<Edge> edges, bool bidirectional,
                            NodeId depot, NodeTolerance tolerance);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    NodeId depot() const { return depot_; }
    const NodeTolerance& tolerance() const { return tolerance_; }
    const NodeSpec& node(NodeId id) const;
    const std::vector<NodeSpec>& nodes() const { return nodes_; }

    /// All directed edges, sorted.
    const std::vector<Edge>& edges() const { return edge_list_; }
    bool has_edge(NodeId i, NodeId j) const;

    /// Successors of i in ascending order.
    std::vector<NodeId> neighbors(NodeId i) const;

    NodeAnchor anchor(NodeId j) const;

private:
    void require_node(NodeId id) const;

    std::vector<NodeSpec> nodes_;
    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<Edge> edge_list_;
    NodeId depot_ = 1;
    NodeTolerance tolerance_{};
};

/// Component-wise tolerance-ball membership on chi plus 0 <= c <= limits (upper bound up to
/// kFeasibilityTol relative, so rounding in accumulated capacities cannot block arrival).
bool in_node_region(const NodeAnchor& anchor, const AgentState& x, const Capacity& limits);

/// The same anchor with every tolerance widened by `margin`.
NodeAnchor widened(const NodeAnchor& anchor, double margin);

/// Max absolute chi difference to the anchor, per dimension.
bool within_anchor(const NodeAnchor& anchor, const NonCapacityState& chi, double tol);

}  // namespace hlmpc
