#include "hlmpc/high_level_controller.hpp"

#include <algorithm>

namespace hlmpc {

namespace {

struct Search {
    const PlannerInputs& in;
    int horizon;
    NodeId depot;
    std::vector<char> blocked;  // visited this iteration or already on the path
    std::vector<std::vector<int>> entries_at;
    int max_suffix = 0;

    std::vector<NodeId> path{};
    std::vector<Capacity> caps{};
    int new_nodes = 0;

    bool found = false;
    HighLevelPlan best{};

    // Best admissible terminal entry for the current path end, or -1.
    int terminal_for_path(int& suffix_out) const {
        const NodeId last = path.back();
        int chosen = -1;
        int chosen_suffix = -1;
        for (int idx : entries_at[last]) {
            const auto& e = in.store.high_safe_set[idx];
            if (e.event_index == 0) continue;  // start-of-iteration entries cannot terminate a plan
            if (!dominated_by(caps.back(), e.cap_ceiling, kFeasibilityTol)) continue;
            bool clash = false;
            for (NodeId n : e.suffix_nodes) {
                if (n != depot && blocked[n]) {
                    clash = true;
                    break;
                }
            }
            if (clash) continue;
            if (e.suffix_task_count > chosen_suffix) {
                chosen = idx;
                chosen_suffix = e.suffix_task_count;
            }
        }
        suffix_out = chosen_suffix;
        return chosen;
    }

    void consider() {
        int suffix = 0;
        int entry = terminal_for_path(suffix);
        if (entry < 0) return;
        int obj = new_nodes + suffix;
        if (!found || obj > best.objective) {
            found = true;
            best.path = path;
            best.predicted_caps = caps;
            best.terminal_entry = entry;
            best.objective = obj;
        }
    }

    void dfs() {
        const int edges = static_cast<int>(path.size()) - 1;
        if (edges >= 1) consider();
        if (edges >= 1 && path.back() == depot) return;
        if (edges >= horizon) return;
        if (found && new_nodes + (horizon - edges) + max_suffix <= best.objective) return;
        const NodeId at = path.back();
        for (NodeId j : in.graph.neighbors(at)) {
            if (j != depot && blocked[j]) continue;
            Capacity next = caps.back() + in.store.theta.at(Edge{at, j});
            if (!dominated_by(next, in.limits, kFeasibilityTol)) continue;
            path.push_back(j);
            caps.push_back(next);
            if (j != depot) {
                blocked[j] = 1;
                ++new_nodes;
            }
            dfs();
            if (j != depot) {
                blocked[j] = 0;
                --new_nodes;
            }
            path.pop_back();
            caps.pop_back();
        }
    }
};

Capacity accumulate(const std::vector<NodeId>& path, const Capacity& start, const ThetaEstimate& theta,
                    std::vector<Capacity>& out) {
    out.assign(1, start);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) out.push_back(out.back() + theta.at(Edge{path[k], path[k + 1]}));
    return out.back();
}

int count_new(const std::vector<NodeId>& path, NodeId depot) {
    int n = 0;
    for (std::size_t k = 1; k < path.size(); ++k)
        if (path[k] != depot) ++n;
    return n;
}

}  // namespace

HighLevelPlan solve_high_level(const HighLevelState& state, const std::set<NodeId>& visited, const PlannerInputs& in,
                               int horizon) {
    if (horizon < 1) throw InputError("high-level horizon must be >= 1");
    const int n = in.graph.node_count();
    Search s{in, horizon, in.graph.depot(), std::vector<char>(n + 1, 0), std::vector<std::vector<int>>(n + 1)};
    for (NodeId v : visited)
        if (v >= 1 && v <= n && v != s.depot) s.blocked[v] = 1;
    if (state.node != s.depot) s.blocked[state.node] = 1;
    for (int idx = 0; idx < static_cast<int>(in.store.high_safe_set.size()); ++idx) {
        const auto& e = in.store.high_safe_set[idx];
        s.entries_at.at(e.node).push_back(idx);
        s.max_suffix = std::max(s.max_suffix, e.suffix_task_count);
    }
    s.path = {state.node};
    s.caps = {state.c};
    s.dfs();
    if (s.found) return s.best;

    // Nothing leaves the depot: stay put if a depot entry admits the current capacity.
    if (state.node == s.depot) {
        int suffix = 0;
        int entry = s.terminal_for_path(suffix);
        if (entry >= 0) return HighLevelPlan{{state.node}, {state.c}, entry, suffix};
    }
    throw PlanningError("no admissible high-level plan from node " + std::to_string(state.node));
}

NodeId next_node(const HighLevelPlan& plan) {
    if (plan.path.size() < 2) throw InputError("plan has no edge");
    return plan.path[1];
}

HighLevelPlan fallback_plan(const HighLevelPlan& prev, const Capacity& arrived_caps, const PlannerInputs& in) {
    if (prev.path.size() < 2) throw InputError("plan has no edge to shift");
    const auto& entries = in.store.high_safe_set;
    const auto& term = entries.at(prev.terminal_entry);
    HighLevelPlan out;
    out.path.assign(prev.path.begin() + 1, prev.path.end());
    out.terminal_entry = prev.terminal_entry;
    if (term.next_entry >= 0) {
        out.path.push_back(term.suffix_nodes.front());
        out.terminal_entry = term.next_entry;
    }
    accumulate(out.path, arrived_caps, in.store.theta, out.predicted_caps);
    out.objective = count_new(out.path, in.graph.depot()) + entries.at(out.terminal_entry).suffix_task_count;
    return out;
}

HighLevelPlan replay_plan(const IterationRecord& rec, const PlannerInputs& in, int horizon) {
    auto nodes = rec.node_sequence();
    if (nodes.size() < 2) throw InputError("record has no edge to replay");
    const std::size_t K = nodes.size() - 1;
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(horizon), K);
    HighLevelPlan out;
    out.path.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(m) + 1);
    const auto& entries = in.store.high_safe_set;
    for (int idx = 0; idx < static_cast<int>(entries.size()); ++idx) {
        if (entries[idx].source_iteration == rec.iteration && entries[idx].event_index == static_cast<int>(m)) {
            out.terminal_entry = idx;
            break;
        }
    }
    if (out.terminal_entry < 0) throw InvariantError("stored iteration missing from the high-level safe set");
    accumulate(out.path, Capacity{}, in.store.theta, out.predicted_caps);
    out.objective = count_new(out.path, in.graph.depot()) + entries[out.terminal_entry].suffix_task_count;
    return out;
}

std::vector<std::vector<int>> plan_matrix(const HighLevelPlan& plan, int node_count) {
    std::vector<std::vector<int>> u(node_count + 1, std::vector<int>(node_count + 1, 0));
    for (std::size_t k = 0; k + 1 < plan.path.size(); ++k) u.at(plan.path[k]).at(plan.path[k + 1]) = 1;
    return u;
}

}  // namespace hlmpc
