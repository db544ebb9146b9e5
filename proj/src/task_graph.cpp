#include "hlmpc/task_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace hlmpc {

std::string edge_name(const Edge& e) {
    return "(" + std::to_string(e.from) + "," + std::to_string(e.to) + ")";
}

namespace {

std::vector<bool> reachable(const std::vector<std::vector<NodeId>>& adj, NodeId start) {
    std::vector<bool> seen(adj.size(), false);
    std::queue<NodeId> q;
    q.push(start);
    seen[start - 1] = true;
    while (!q.empty()) {
        NodeId i = q.front();
        q.pop();
        for (NodeId j : adj[i - 1]) {
            if (!seen[j - 1]) {
                seen[j - 1] = true;
                q.push(j);
            }
        }
    }
    return seen;
}

}  // namespace

TaskGraph TaskGraph::create(std::vector<NodeSpec> nodes, std::vector<Edge> edges, bool bidirectional,
                            NodeId depot, NodeTolerance tolerance) {
    std::vector<std::string> errors;
    const int n = static_cast<int>(nodes.size());
    if (n == 0) errors.push_back("graph.nodes: at least one node is required");

    std::sort(nodes.begin(), nodes.end(), [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
    for (int k = 0; k < n; ++k) {
        if (nodes[k].id != k + 1) {
            errors.push_back("graph.nodes: ids must be exactly 1.." + std::to_string(n));
            break;
        }
    }
    for (const auto& nd : nodes) {
        if (!std::isfinite(nd.x) || !std::isfinite(nd.y) || !std::isfinite(nd.heading))
            errors.push_back("graph.nodes[" + std::to_string(nd.id) + "]: non-finite coordinate");
        if (std::abs(nd.heading) > std::numbers::pi)
            errors.push_back("graph.nodes[" + std::to_string(nd.id) + "]: heading outside [-pi, pi]");
    }
    if (depot < 1 || depot > n) errors.push_back("graph.depot: must be a node id in [1, " + std::to_string(n) + "]");
    if (!(tolerance.position >= 0.0) || !(tolerance.heading >= 0.0) || !(tolerance.velocity >= 0.0))
        errors.push_back("graph.node_tolerance: must be non-negative");

    std::set<Edge> edge_set;
    for (const auto& e : edges) {
        if (e.from < 1 || e.from > n || e.to < 1 || e.to > n) {
            errors.push_back("graph.edges: endpoint out of range in " + edge_name(e));
            continue;
        }
        if (e.from == e.to) {
            errors.push_back("graph.edges: self-loop " + edge_name(e));
            continue;
        }
        edge_set.insert(e);
        if (bidirectional) edge_set.insert(Edge{e.to, e.from});
    }

    if (errors.empty()) {
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                double dx = std::abs(nodes[a].x - nodes[b].x);
                double dy = std::abs(nodes[a].y - nodes[b].y);
                if (std::max(dx, dy) <= 2.0 * tolerance.position) {
                    errors.push_back("graph.nodes: anchors of nodes " + std::to_string(a + 1) + " and " +
                                     std::to_string(b + 1) + " are not separated by more than twice the tolerance");
                }
            }
        }
        for (const auto& e : edge_set) {
            const auto& p = nodes[e.from - 1];
            const auto& q = nodes[e.to - 1];
            if (p.x == q.x && p.y == q.y) errors.push_back("graph.edges: zero-length edge " + edge_name(e));
        }
    }

    TaskGraph g;
    if (errors.empty()) {
        g.nodes_ = std::move(nodes);
        g.adjacency_.assign(n, {});
        for (const auto& e : edge_set) g.adjacency_[e.from - 1].push_back(e.to);
        g.edge_list_.assign(edge_set.begin(), edge_set.end());
        g.depot_ = depot;
        g.tolerance_ = tolerance;

        auto fwd = reachable(g.adjacency_, depot);
        std::vector<std::vector<NodeId>> rev(n);
        for (const auto& e : edge_set) rev[e.to - 1].push_back(e.from);
        auto bwd = reachable(rev, depot);
        for (int k = 0; k < n; ++k) {
            if (!fwd[k]) errors.push_back("graph: node " + std::to_string(k + 1) + " is not reachable from the depot");
            if (!bwd[k]) errors.push_back("graph: depot is not reachable from node " + std::to_string(k + 1));
        }
    }

    if (!errors.empty()) {
        std::ostringstream os;
        for (std::size_t k = 0; k < errors.size(); ++k) os << (k ? "\n" : "") << errors[k];
        throw ConfigError(os.str());
    }
    return g;
}

void TaskGraph::require_node(NodeId id) const {
    if (id < 1 || id > node_count()) throw InputError("node index out of range: " + std::to_string(id));
}

const NodeSpec& TaskGraph::node(NodeId id) const {
    require_node(id);
    return nodes_[id - 1];
}

bool TaskGraph::has_edge(NodeId i, NodeId j) const {
    if (i < 1 || i > node_count()) return false;
    const auto& adj = adjacency_[i - 1];
    return std::binary_search(adj.begin(), adj.end(), j);
}

std::vector<NodeId> TaskGraph::neighbors(NodeId i) const {
    require_node(i);
    return adjacency_[i - 1];
}

NodeAnchor TaskGraph::anchor(NodeId j) const {
    const auto& nd = node(j);
    return NodeAnchor{j, NonCapacityState{nd.x, nd.y, nd.heading, 0.0}, tolerance_};
}

bool within_anchor(const NodeAnchor& anchor, const NonCapacityState& chi, double tol) {
    const auto& a = anchor.anchor_chi;
    return std::abs(chi.z - a.z) <= tol && std::abs(chi.y - a.y) <= tol && std::abs(chi.theta - a.theta) <= tol &&
           std::abs(chi.v - a.v) <= tol;
}

NodeAnchor widened(const NodeAnchor& anchor, double margin) {
    NodeAnchor out = anchor;
    out.tolerance.position += margin;
    out.tolerance.heading += margin;
    out.tolerance.velocity += margin;
    return out;
}

bool in_node_region(const NodeAnchor& anchor, const AgentState& x, const Capacity& limits) {
    const auto& a = anchor.anchor_chi;
    const auto& t = anchor.tolerance;
    if (!(std::abs(x.chi.z - a.z) <= t.position && std::abs(x.chi.y - a.y) <= t.position)) return false;
    if (!(std::abs(x.chi.theta - a.theta) <= t.heading)) return false;
    if (!(std::abs(x.chi.v - a.v) <= t.velocity)) return false;
    for (std::size_t l = 0; l < kCapacityCount; ++l)
        if (!(x.c[l] >= 0.0 && x.c[l] <= limits[l] + kFeasibilityTol * std::max(1.0, limits[l]))) return false;
    return true;
}

}  // namespace hlmpc
