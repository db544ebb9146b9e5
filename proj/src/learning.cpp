#include "hlmpc/learning.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hlmpc {

const Capacity& ThetaEstimate::at(const Edge& e) const {
    auto it = values.find(e);
    if (it == values.end()) throw InputError("no theta estimate for edge " + edge_name(e));
    return it->second;
}

bool ThetaBound::contains(const Edge& e, const Capacity& theta) const {
    if (!upper.has(e)) return false;
    const auto& hi = upper.at(e);
    for (std::size_t l = 0; l < kCapacityCount; ++l)
        if (theta[l] < 0.0 || theta[l] > hi[l]) return false;
    return true;
}

bool ThetaBound::subset_of(const ThetaBound& other) const {
    for (const auto& [e, hi] : upper.values) {
        if (!other.contains(e, hi)) return false;
    }
    return true;
}

ThetaEstimate update_theta(const std::vector<IterationRecord>& records, const ThetaEstimate& prior,
                           const std::vector<Edge>& edges, int iteration) {
    ThetaEstimate out = prior;
    out.iteration = iteration;
    auto absorb = [&](const Edge& e, const Capacity& w) {
        auto it = out.values.find(e);
        if (it == out.values.end()) {
            out.values.emplace(e, w);
            return;
        }
        for (std::size_t l = 0; l < kCapacityCount; ++l) it->second[l] = std::min(it->second[l], w[l]);
    };
    for (const auto& rec : records) {
        for (std::size_t k = 0; k + 1 < rec.events.size(); ++k) {
            const auto& a = rec.events[k];
            const auto& b = rec.events[k + 1];
            absorb(Edge{a.node, b.node}, rec.states.at(b.time).c - rec.states.at(a.time).c);
        }
    }
    for (const auto& e : edges) {
        if (!out.has(e)) throw InvariantError("initialization left edge " + edge_name(e) + " without data");
    }
    return out;
}

ThetaBound update_theta_bound(const ThetaEstimate& theta) { return ThetaBound{theta}; }

std::vector<Capacity> backpropagate_capacities(const std::vector<NodeId>& nodes, const ThetaEstimate& theta,
                                               const Capacity& limits) {
    if (nodes.size() < 2) throw InputError("node sequence needs at least two events");
    if (nodes.front() != nodes.back()) throw InputError("node sequence must start and end at the depot");
    const std::size_t K = nodes.size() - 1;
    std::vector<Capacity> ceil(nodes.size());
    ceil[K] = limits;
    ceil[0] = Capacity{};
    for (std::size_t k = K - 1; k >= 1; --k) {
        const auto& th = theta.at(Edge{nodes[k], nodes[k + 1]});
        ceil[k] = ceil[k + 1] - th;
        for (std::size_t l = 0; l < kCapacityCount; ++l) {
            if (ceil[k][l] < 0.0) {
                std::ostringstream os;
                os << "route suffix from event " << k << " exceeds capacity " << l << " under theta";
                throw InfeasibleRouteError(os.str());
            }
        }
    }
    return ceil;
}

bool HighSafeSetEntry::suffix_contains(NodeId n) const {
    return std::find(suffix_nodes.begin(), suffix_nodes.end(), n) != suffix_nodes.end();
}

std::vector<HighSafeSetEntry> build_high_safe_set(const std::vector<IterationRecord>& records,
                                                  const std::vector<ThetaEstimate>& theta_history,
                                                  const Capacity& limits, NodeId depot) {
    if (theta_history.size() < records.size())
        throw InvariantError("theta history shorter than the record archive");
    std::vector<HighSafeSetEntry> out;
    for (std::size_t p = 0; p < records.size(); ++p) {
        const auto& rec = records[p];
        if (!rec.complete) throw InvariantError("safe set built from an incomplete iteration");
        auto nodes = rec.node_sequence();
        auto ceil = backpropagate_capacities(nodes, theta_history[p], limits);
        const int base = static_cast<int>(out.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            HighSafeSetEntry e;
            e.source_iteration = rec.iteration;
            e.event_index = static_cast<int>(k);
            e.node = nodes[k];
            e.cap_ceiling = ceil[k];
            e.suffix_nodes.assign(nodes.begin() + static_cast<std::ptrdiff_t>(k) + 1, nodes.end());
            std::set<NodeId> tasks;
            for (NodeId n : e.suffix_nodes)
                if (n != depot) tasks.insert(n);
            e.suffix_task_count = static_cast<int>(tasks.size());
            e.next_entry = k + 1 < nodes.size() ? base + static_cast<int>(k) + 1 : -1;
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::optional<int> q_high(const std::vector<HighSafeSetEntry>& entries, NodeId node, const Capacity& cap_ceiling) {
    std::optional<int> best;
    for (const auto& e : entries) {
        if (e.node != node || e.cap_ceiling != cap_ceiling) continue;
        if (!best || e.suffix_task_count > *best) best = e.suffix_task_count;
    }
    return best;
}

std::vector<std::string> safe_set_soundness(const std::vector<HighSafeSetEntry>& entries, const ThetaEstimate& theta,
                                            const Capacity& limits, NodeId depot) {
    std::vector<std::string> problems;
    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
        const auto& e = entries[idx];
        std::string tag = "entry (" + std::to_string(e.source_iteration) + "," + std::to_string(e.event_index) + ")";
        Capacity c = e.cap_ceiling;
        if (!dominated_by(c, limits, kFeasibilityTol)) problems.push_back(tag + ": ceiling above limits");
        NodeId at = e.node;
        for (NodeId n : e.suffix_nodes) {
            c = c + theta.at(Edge{at, n});
            if (!dominated_by(c, limits, kFeasibilityTol)) {
                problems.push_back(tag + ": suffix exceeds limits at node " + std::to_string(n));
                break;
            }
            at = n;
        }
        if (at != depot) problems.push_back(tag + ": suffix does not end at the depot");
    }
    return problems;
}

int stage_cost(const NodeAnchor& target, const AgentState& x, const Capacity& limits) {
    return in_node_region(target, x, limits) ? 0 : 1;
}

StoredEdgeTrajectory make_stored_trajectory(const Edge& edge, const std::vector<AgentState>& states,
                                            const std::vector<ControlInput>& inputs, const NodeAnchor& target,
                                            const Capacity& limits, int source_iteration) {
    if (states.size() != inputs.size() + 1) throw InputError("state/input length mismatch");
    StoredEdgeTrajectory st;
    st.edge = edge;
    st.source_iteration = source_iteration;
    st.inputs = inputs;
    st.states.reserve(states.size());
    const Capacity origin = states.front().c;
    for (const auto& x : states) st.states.push_back(AgentState{x.c - origin, x.chi});
    st.states.front().c = Capacity{};
    st.cost_to_go.assign(states.size(), 0);
    for (std::size_t s = states.size(); s-- > 0;) {
        int h = stage_cost(target, st.states[s], limits);
        st.cost_to_go[s] = h + (s + 1 < states.size() ? st.cost_to_go[s + 1] : 0);
    }
    return st;
}

LowSafeSet update_low_safe_set(LowSafeSet store, const IterationRecord& rec, const TaskGraph& graph,
                               const Capacity& limits) {
    std::map<Edge, StoredEdgeTrajectory> fresh;
    for (auto& t : traversals(rec)) {
        auto st = make_stored_trajectory(t.edge, t.states, t.inputs, graph.anchor(t.edge.to), limits, rec.iteration);
        auto it = fresh.find(t.edge);
        if (it == fresh.end() || st.cost_to_go.front() <= it->second.cost_to_go.front())
            fresh[t.edge] = std::move(st);
    }
    for (auto& [e, st] : fresh) store[e] = std::move(st);
    return store;
}

}  // namespace hlmpc
