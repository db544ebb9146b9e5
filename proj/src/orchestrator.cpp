#include "hlmpc/orchestrator.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "hlmpc/motion.hpp"
#include "hlmpc/oracle.hpp"

namespace hlmpc {

namespace {

double scalar_weight(const Capacity& theta, const Capacity& limits) {
    double w = 0.0;
    for (std::size_t l = 0; l < kCapacityCount; ++l) w += theta[l] / limits[l];
    return w;
}

// Cheapest path from `from` to the depot through nodes not marked in `blocked`.
std::vector<NodeId> return_path(const TaskGraph& graph, const ThetaEstimate& theta, const Capacity& limits,
                                NodeId from, const std::vector<char>& blocked) {
    const int n = graph.node_count();
    const NodeId depot = graph.depot();
    std::vector<double> dist(n + 1, std::numeric_limits<double>::infinity());
    std::vector<NodeId> prev(n + 1, 0);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[from] = 0.0;
    queue.push({0.0, from});
    while (!queue.empty()) {
        auto [d, i] = queue.top();
        queue.pop();
        if (d > dist[i] || i == depot) continue;
        for (NodeId j : graph.neighbors(i)) {
            if (j != depot && blocked[j]) continue;
            double nd = d + scalar_weight(theta.at(Edge{i, j}), limits);
            if (nd < dist[j]) {
                dist[j] = nd;
                prev[j] = i;
                queue.push({nd, j});
            }
        }
    }
    if (!std::isfinite(dist[depot])) return {};
    std::vector<NodeId> path{depot};
    while (path.front() != from) path.insert(path.begin(), prev[path.front()]);
    return path;
}

bool affordable(const std::vector<NodeId>& path, Capacity c, const ThetaEstimate& theta, const Capacity& limits) {
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        c = c + theta.at(Edge{path[k], path[k + 1]});
        if (!dominated_by(c, limits, kFeasibilityTol)) return false;
    }
    return true;
}

}  // namespace

std::vector<NodeId> greedy_initial_route(const TaskGraph& graph, const ThetaEstimate& theta, const Capacity& limits) {
    const NodeId depot = graph.depot();
    std::vector<char> blocked(graph.node_count() + 1, 0);
    std::vector<NodeId> route{depot};
    Capacity c{};
    while (true) {
        const NodeId at = route.back();
        NodeId pick = 0;
        double best = std::numeric_limits<double>::infinity();
        for (NodeId j : graph.neighbors(at)) {
            if (j == depot || blocked[j]) continue;
            const Capacity& th = theta.at(Edge{at, j});
            double w = scalar_weight(th, limits);
            if (w >= best) continue;
            Capacity cj = c + th;
            if (!dominated_by(cj, limits, kFeasibilityTol)) continue;
            blocked[j] = 1;
            auto back = return_path(graph, theta, limits, j, blocked);
            blocked[j] = 0;
            if (back.empty() || !affordable(back, cj, theta, limits)) continue;
            best = w;
            pick = j;
        }
        if (pick == 0) break;
        c = c + theta.at(Edge{at, pick});
        blocked[pick] = 1;
        route.push_back(pick);
    }
    if (route.size() == 1) throw ConfigError("no node can be visited and left within the capacity limits");
    auto back = return_path(graph, theta, limits, route.back(), blocked);
    route.insert(route.end(), back.begin() + 1, back.end());
    return route;
}

Orchestrator::Orchestrator(TaskGraph graph, DynamicsConfig dynamics, ControllerOptions options)
    : graph_(std::move(graph)), dynamics_(dynamics), options_(options) {
    if (options_.horizon_high < 1) throw ConfigError("horizon_high must be >= 1");
    if (options_.horizon_low < 1) throw ConfigError("horizon_low must be >= 1");
    if (options_.shoot_budget < 0) throw ConfigError("shoot_budget must be >= 0");
    state_.rng_seed = options_.seed;
}

AgentState Orchestrator::start_state() const { return AgentState{Capacity{}, graph_.anchor(graph_.depot()).anchor_chi}; }

PlannerInputs Orchestrator::planner_inputs() const {
    return PlannerInputs{graph_, state_.learning, dynamics_.capacity_limits};
}

void Orchestrator::check_plan(const HighLevelPlan& plan, const HighLevelState& at) const {
    auto bad = validate_plan(plan, at, state_.visited, planner_inputs(), options_.horizon_high);
    if (!bad.empty()) throw InvariantError("invalid high-level plan at node " + std::to_string(at.node) + ": " + bad.front());
}

void Orchestrator::initialize() {
    const auto& limits = dynamics_.capacity_limits;
    ThetaEstimate theta0;
    for (const Edge& e : graph_.edges()) {
        const auto& from = graph_.anchor(e.from);
        const auto& to = graph_.anchor(e.to);
        auto inputs = shortest_connection(dynamics_, from.anchor_chi, to.anchor_chi, dynamics_.init_velocity_cap);
        if (!inputs) throw ConfigError("edge " + edge_name(e) + " has no conservative trajectory");
        auto states = rollout(dynamics_, AgentState{Capacity{}, from.anchor_chi}, *inputs);
        for (std::size_t t = 0; t < states.size(); ++t) {
            if (!check_constraints(dynamics_, states[t], t < inputs->size() ? &(*inputs)[t] : nullptr, kFeasibilityTol)
                     .empty())
                throw ConfigError("conservative trajectory on edge " + edge_name(e) + " violates a constraint");
            if (t > 0 && t + 1 < states.size() && in_node_region(widened(to, kRegionEntryMargin), states[t], limits))
                throw ConfigError("conservative trajectory on edge " + edge_name(e) +
                                  " enters the target region before reaching the anchor; increase the heading "
                                  "change at the target or its approach angle");
        }
        if (!within_anchor(to, states.back().chi, kAnchorArrivalTol) || !in_node_region(to, states.back(), limits))
            throw ConfigError("conservative trajectory on edge " + edge_name(e) + " misses the target anchor");
        theta0.values[e] = states.back().c;
        state_.initial_trajectories[e] = make_stored_trajectory(e, states, *inputs, to, limits, -1);
    }

    auto route = greedy_initial_route(graph_, theta0, limits);
    state_.learning = LearningStore{};
    state_.learning.theta = theta0;
    state_.learning.bound = update_theta_bound(theta0);
    state_.learning.low_safe_set = state_.initial_trajectories;

    const LowLevelOptions lopt{options_.horizon_low, false, options_.shoot_budget, options_.seed};
    IterationRecord rec;
    rec.iteration = 0;
    rec.states = {start_state()};
    rec.events = {Event{0, 0, graph_.depot()}};
    IterationMetrics m;
    for (std::size_t k = 0; k + 1 < route.size(); ++k) {
        auto run = track_edge(rec.states.back(), Edge{route[k], route[k + 1]}, graph_, state_.learning, dynamics_, lopt);
        rec.states.insert(rec.states.end(), run.states.begin() + 1, run.states.end());
        rec.inputs.insert(rec.inputs.end(), run.inputs.begin(), run.inputs.end());
        rec.events.push_back(Event{static_cast<int>(k) + 1, rec.states.size() - 1, route[k + 1]});
        m.low_level_solves += run.solves;
    }
    rec.complete = true;
    m.iteration = 0;
    m.tasks = count_tasks(rec, graph_.depot());
    m.total_soc = rec.states.back().c[kSoc];
    m.total_time = rec.states.back().c[kTime];

    state_.archive = {rec};
    state_.metrics = {m};
    state_.plan_traces = {{}};
    state_.visited.clear();
    initialized_ = true;
    update_learning(state_.archive.back());
    state_.iteration = 1;
}

void Orchestrator::update_learning(const IterationRecord& rec) {
    auto& L = state_.learning;
    const auto& limits = dynamics_.capacity_limits;
    L.theta = update_theta({rec}, L.theta, graph_.edges(), rec.iteration + 1);
    L.bound = update_theta_bound(L.theta);
    L.theta_history.push_back(L.theta);
    L.high_safe_set = build_high_safe_set(state_.archive, L.theta_history, limits, graph_.depot());
    auto problems = safe_set_soundness(L.high_safe_set, L.theta, limits, graph_.depot());
    if (!problems.empty()) throw InvariantError("unsound high-level safe set: " + problems.front());
    L.low_safe_set = update_low_safe_set(std::move(L.low_safe_set), rec, graph_, limits);
}

IterationRecord Orchestrator::execute_iteration(std::vector<PlanTrace>& trace, IterationMetrics& metrics) {
    const NodeId depot = graph_.depot();
    const auto& limits = dynamics_.capacity_limits;
    const auto in = planner_inputs();
    const LowLevelOptions lopt{options_.horizon_low, options_.improver, options_.shoot_budget, state_.rng_seed};
    const auto budget = static_cast<std::size_t>(std::llround(limits[kTime] / dynamics_.dt));

    IterationRecord rec;
    rec.iteration = state_.iteration;
    rec.states = {start_state()};
    rec.events = {Event{0, 0, depot}};
    state_.visited.clear();

    HighLevelState at{depot, Capacity{}};
    HighLevelPlan plan = options_.improver ? solve_high_level(at, state_.visited, in, options_.horizon_high)
                                           : replay_plan(state_.archive.back(), in, options_.horizon_high);
    check_plan(plan, at);
    if (options_.improver && plan.objective < state_.metrics.back().tasks)
        throw InvariantError("initial plan promises fewer tasks than the previous iteration completed");
    trace.push_back(PlanTrace{0, at, plan, -1});

    for (int k = 0; plan.path.size() > 1; ++k) {
        state_.current_plan = plan;
        const Edge e{at.node, next_node(plan)};
        auto run = track_edge(rec.states.back(), e, graph_, state_.learning, dynamics_, lopt);
        rec.states.insert(rec.states.end(), run.states.begin() + 1, run.states.end());
        rec.inputs.insert(rec.inputs.end(), run.inputs.begin(), run.inputs.end());
        if (rec.inputs.size() > budget) throw InvariantError("iteration exceeded its step budget");
        rec.events.push_back(Event{k + 1, rec.states.size() - 1, e.to});
        metrics.low_level_solves += run.solves;
        metrics.improved_solves += run.improved_solves;

        at = HighLevelState{e.to, rec.states.back().c};
        if (!dominated_by(at.c, plan.predicted_caps[1], kFeasibilityTol))
            throw InvariantError("arrival capacities exceed the planned prediction on edge " + edge_name(e));
        if (e.to == depot) break;
        state_.visited.insert(e.to);

        auto fallback = fallback_plan(plan, at.c, in);
        check_plan(fallback, at);
        if (options_.improver) {
            plan = solve_high_level(at, state_.visited, in, options_.horizon_high);
            check_plan(plan, at);
            if (plan.objective < fallback.objective)
                throw InvariantError("re-plan at node " + std::to_string(at.node) + " is worse than the fallback");
        } else {
            plan = fallback;
        }
        trace.push_back(PlanTrace{k + 1, at, plan, fallback.objective});
    }
    if (rec.events.back().node != depot) throw InvariantError("iteration ended away from the depot");
    rec.complete = true;
    return rec;
}

const IterationRecord& Orchestrator::run_iteration() {
    if (!initialized_) initialize();
    std::vector<PlanTrace> trace;
    IterationMetrics m;
    m.iteration = state_.iteration;
    auto rec = execute_iteration(trace, m);
    m.tasks = count_tasks(rec, graph_.depot());
    m.total_soc = rec.states.back().c[kSoc];
    m.total_time = rec.states.back().c[kTime];
    state_.archive.push_back(std::move(rec));
    state_.metrics.push_back(m);
    state_.plan_traces.push_back(std::move(trace));
    update_learning(state_.archive.back());
    ++state_.iteration;
    return state_.archive.back();
}

void Orchestrator::run(int iterations) {
    if (!initialized_) initialize();
    for (int r = 0; r < iterations; ++r) run_iteration();
}

}  // namespace hlmpc
