#include "hlmpc/trajectory_store.hpp"

#include <set>

namespace hlmpc {

std::vector<NodeId> IterationRecord::node_sequence() const {
    std::vector<NodeId> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(e.node);
    return out;
}

std::vector<TimeRange> all_index_ranges(const IterationRecord& rec, NodeId i, NodeId j) {
    std::vector<TimeRange> out;
    for (std::size_t k = 0; k + 1 < rec.events.size(); ++k) {
        if (rec.events[k].node == i && rec.events[k + 1].node == j)
            out.push_back(TimeRange{rec.events[k].time, rec.events[k + 1].time});
    }
    return out;
}

std::optional<TimeRange> index_range(const IterationRecord& rec, NodeId i, NodeId j) {
    for (std::size_t k = 0; k + 1 < rec.events.size(); ++k) {
        if (rec.events[k].node == i && rec.events[k + 1].node == j)
            return TimeRange{rec.events[k].time, rec.events[k + 1].time};
    }
    return std::nullopt;
}

std::optional<double> omega(const IterationRecord& rec, NodeId i, NodeId j, std::size_t l) {
    auto r = index_range(rec, i, j);
    if (!r || l >= kCapacityCount) return std::nullopt;
    return rec.states.at(r->tf).c[l] - rec.states.at(r->t0).c[l];
}

std::vector<Capacity> omega_all(const IterationRecord& rec, NodeId i, NodeId j) {
    std::vector<Capacity> out;
    for (const auto& r : all_index_ranges(rec, i, j)) out.push_back(rec.states.at(r.tf).c - rec.states.at(r.t0).c);
    return out;
}

HighLevelState abstract(const AgentState& x, const TaskGraph& graph, const Capacity& limits) {
    for (NodeId j = 1; j <= graph.node_count(); ++j) {
        if (in_node_region(graph.anchor(j), x, limits)) return HighLevelState{j, x.c};
    }
    throw DomainError("state is not inside any node region");
}

std::vector<HighLevelState> abstract_trajectory(const IterationRecord& rec) {
    std::vector<HighLevelState> out;
    out.reserve(rec.events.size());
    for (const auto& e : rec.events) out.push_back(HighLevelState{e.node, rec.states.at(e.time).c});
    return out;
}

int count_tasks(const std::vector<HighLevelState>& hl, NodeId depot) {
    std::set<NodeId> seen;
    for (const auto& s : hl)
        if (s.node != depot) seen.insert(s.node);
    return static_cast<int>(seen.size());
}

int count_tasks(const IterationRecord& rec, NodeId depot) { return count_tasks(abstract_trajectory(rec), depot); }

std::vector<EdgeTraversal> traversals(const IterationRecord& rec) {
    std::vector<EdgeTraversal> out;
    for (std::size_t k = 0; k + 1 < rec.events.size(); ++k) {
        EdgeTraversal t;
        t.edge = Edge{rec.events[k].node, rec.events[k + 1].node};
        t.range = TimeRange{rec.events[k].time, rec.events[k + 1].time};
        t.states.assign(rec.states.begin() + static_cast<std::ptrdiff_t>(t.range.t0),
                        rec.states.begin() + static_cast<std::ptrdiff_t>(t.range.tf) + 1);
        t.inputs.assign(rec.inputs.begin() + static_cast<std::ptrdiff_t>(t.range.t0),
                        rec.inputs.begin() + static_cast<std::ptrdiff_t>(t.range.tf));
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace hlmpc
