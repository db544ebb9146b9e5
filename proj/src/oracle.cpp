#include "hlmpc/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace hlmpc {

namespace {

struct RouteSearch {
    const TaskGraph& graph;
    const ThetaEstimate& theta;
    const Capacity& limits;
    NodeId depot;
    std::vector<char> used;
    std::vector<NodeId> nodes{};
    std::vector<Capacity> caps{};
    OracleRoute best{};
    bool found = false;

    void dfs() {
        const NodeId at = nodes.back();
        for (NodeId j : graph.neighbors(at)) {
            if (j != depot && used[j]) continue;
            Capacity next = caps.back() + theta.at(Edge{at, j});
            if (!dominated_by(next, limits, kFeasibilityTol)) continue;
            nodes.push_back(j);
            caps.push_back(next);
            if (j == depot) {
                int tasks = static_cast<int>(nodes.size()) - 2;
                if (!found || tasks > best.tasks) {
                    found = true;
                    best = OracleRoute{nodes, caps, tasks};
                }
            } else {
                used[j] = 1;
                dfs();
                used[j] = 0;
            }
            nodes.pop_back();
            caps.pop_back();
        }
    }
};

}  // namespace

OracleRoute brute_force_route(const TaskGraph& graph, const ThetaEstimate& theta, const Capacity& limits) {
    if (graph.node_count() > kOracleMaxNodes)
        throw InputError("brute-force oracle refuses graphs with more than " + std::to_string(kOracleMaxNodes) +
                         " nodes");
    RouteSearch s{graph, theta, limits, graph.depot(), std::vector<char>(graph.node_count() + 1, 0)};
    s.nodes = {graph.depot()};
    s.caps = {Capacity{}};
    s.dfs();
    if (!s.found) return OracleRoute{{graph.depot()}, {Capacity{}}, 0};
    return s.best;
}

bool validate_alg2(const std::vector<NodeId>& nodes, const ThetaEstimate& theta, const Capacity& limits,
                   const std::vector<Capacity>& ceilings) {
    if (nodes.size() < 2 || ceilings.size() != nodes.size()) return false;
    const std::size_t K = nodes.size() - 1;
    const bool closed = nodes.front() == nodes.back();
    for (std::size_t k = 0; k <= K; ++k) {
        Capacity c = ceilings[k];
        if (!dominated_by(c, limits, kFeasibilityTol)) return false;
        for (std::size_t m = k; m < K; ++m) {
            if (!theta.has(Edge{nodes[m], nodes[m + 1]})) return false;
            c = c + theta.at(Edge{nodes[m], nodes[m + 1]});
            if (!dominated_by(c, limits, kFeasibilityTol)) return false;
        }
        // The start of a closed route is pinned at zero rather than back-propagated.
        if (k == 0 && closed && K > 0) {
            if (ceilings[0] != Capacity{}) return false;
            continue;
        }
        for (std::size_t l = 0; l < kCapacityCount; ++l)
            if (std::abs(c[l] - limits[l]) > kFeasibilityTol * std::max(1.0, limits[l])) return false;
    }
    return true;
}

AgentState straight_line_state(const DynamicsConfig& cfg, double v0, double a, int t) {
    const double dt = cfg.dt;
    const double n = static_cast<double>(t);
    AgentState x;
    x.chi.v = v0 + a * dt * n;
    x.chi.z = dt * (n * v0 + a * dt * n * (n - 1.0) / 2.0);
    x.c[kSoc] = cfg.alpha * x.chi.z;
    x.c[kTime] = dt * n;
    return x;
}

std::vector<std::string> validate_plan(const HighLevelPlan& plan, const HighLevelState& state,
                                       const std::set<NodeId>& visited, const PlannerInputs& in, int horizon) {
    std::vector<std::string> bad;
    const NodeId depot = in.graph.depot();
    const auto& entries = in.store.high_safe_set;
    if (plan.path.empty() || plan.path.front() != state.node) bad.push_back("path does not start at the current node");
    if (plan.predicted_caps.size() != plan.path.size()) bad.push_back("predicted capacities misaligned with path");
    if (static_cast<int>(plan.path.size()) > horizon + 1) bad.push_back("path longer than the horizon");
    if (!bad.empty()) return bad;
    if (plan.predicted_caps.front() != state.c) bad.push_back("first predicted capacity differs from the state");

    std::set<NodeId> on_path;
    if (state.node != depot) on_path.insert(state.node);
    for (std::size_t k = 1; k < plan.path.size(); ++k) {
        const NodeId a = plan.path[k - 1], b = plan.path[k];
        if (!in.graph.has_edge(a, b)) {
            bad.push_back("step " + std::to_string(k) + " is not a graph edge");
            continue;
        }
        if (b == depot && k + 1 != plan.path.size()) bad.push_back("depot appears before the end of the path");
        if (b != depot) {
            if (visited.count(b)) bad.push_back("node " + std::to_string(b) + " already visited");
            if (!on_path.insert(b).second) bad.push_back("node " + std::to_string(b) + " repeated on the path");
        }
        Capacity expect = plan.predicted_caps[k - 1] + in.store.theta.at(Edge{a, b});
        if (expect != plan.predicted_caps[k]) bad.push_back("capacity accumulator mismatch at step " + std::to_string(k));
        if (!dominated_by(plan.predicted_caps[k], in.limits, kFeasibilityTol))
            bad.push_back("predicted capacity above limits at step " + std::to_string(k));
    }
    if (plan.terminal_entry < 0 || plan.terminal_entry >= static_cast<int>(entries.size())) {
        bad.push_back("missing terminal safe-set entry");
        return bad;
    }
    const auto& e = entries[plan.terminal_entry];
    if (e.node != plan.path.back()) bad.push_back("terminal entry node differs from the path end");
    if (e.event_index == 0) bad.push_back("terminal entry is an iteration start");
    if (!dominated_by(plan.predicted_caps.back(), e.cap_ceiling, kFeasibilityTol))
        bad.push_back("terminal capacity above the entry ceiling");
    for (NodeId n : e.suffix_nodes) {
        if (n == depot) continue;
        if (on_path.count(n) || visited.count(n))
            bad.push_back("suffix node " + std::to_string(n) + " already on the path or visited");
    }
    int expected = 0;
    for (std::size_t k = 1; k < plan.path.size(); ++k)
        if (plan.path[k] != depot) ++expected;
    expected += e.suffix_task_count;
    if (expected != plan.objective) bad.push_back("objective does not match the path and terminal entry");
    return bad;
}

}  // namespace hlmpc
