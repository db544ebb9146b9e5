#include "hlmpc/low_level_controller.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "hlmpc/motion.hpp"

namespace hlmpc {

namespace {

// Improved candidates stop this far short of the matched stored state so their
// state-of-charge use stays strictly below the stored one despite rounding.
constexpr double kDistanceMargin = 1e-10;

bool chi_close(const NonCapacityState& a, const NonCapacityState& b, double tol) {
    return std::abs(a.z - b.z) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.theta - b.theta) <= tol &&
           std::abs(a.v - b.v) <= tol;
}

// All horizon constraints of one candidate. Returns nullopt when any of them fails.
std::optional<LowLevelSolution> evaluate(const AgentState& x, const EdgeContext& ctx, const Capacity& start,
                                         std::vector<ControlInput> inputs, std::size_t s_star, double match_tol,
                                         double entry_margin) {
    const auto& st = ctx.stored;
    const auto& cfg = ctx.cfg;
    const auto& limits = cfg.capacity_limits;
    if (s_star > st.length() || inputs.empty()) return std::nullopt;
    LowLevelSolution sol;
    const NodeAnchor guard = widened(ctx.target, entry_margin);
    sol.predicted = rollout(cfg, x, inputs);
    for (const auto& u : inputs)
        if (!input_feasible(cfg, u)) return std::nullopt;
    for (std::size_t k = 0; k < sol.predicted.size(); ++k) {
        const auto& p = sol.predicted[k];
        if (!state_feasible(cfg, p)) return std::nullopt;
        if (k + 1 < sol.predicted.size() && in_node_region(guard, p, limits)) return std::nullopt;
    }
    const auto& term = sol.predicted.back();
    const auto& ref = st.states[s_star];
    if (!chi_close(term.chi, ref.chi, match_tol)) return std::nullopt;
    if (!dominated_by(term.c - start, ref.c, kFeasibilityTol)) return std::nullopt;
    sol.terminal_in_region = in_node_region(ctx.target, term, limits);
    // Arrival latches on region entry, so entering anywhere but the anchor is rejected.
    if (s_star == st.length() && !sol.terminal_in_region) return std::nullopt;
    if (sol.terminal_in_region && !within_anchor(ctx.target, term.chi, kAnchorArrivalTol)) return std::nullopt;
    int stage = 0;
    for (std::size_t k = 0; k + 1 < sol.predicted.size(); ++k) stage += stage_cost(ctx.target, sol.predicted[k], limits);
    sol.cost = stage + st.cost_to_go[s_star];
    sol.terminal_match = s_star;
    sol.inputs = std::move(inputs);
    sol.tail.assign(st.inputs.begin() + static_cast<std::ptrdiff_t>(s_star), st.inputs.end());
    return sol;
}

// Re-simulates the stored tail from the candidate's own terminal state. Every state
// must keep matching the stored one so later shifted fallbacks stay admissible.
bool tail_arrives(const EdgeContext& ctx, const Capacity& start, const LowLevelSolution& sol) {
    const auto& cfg = ctx.cfg;
    const auto& limits = cfg.capacity_limits;
    const auto& st = ctx.stored;
    AgentState x = sol.predicted.back();
    if (sol.terminal_in_region) return true;
    const NodeAnchor guard = widened(ctx.target, kRegionEntryMargin);
    for (std::size_t i = 0; i < sol.tail.size(); ++i) {
        x = step(cfg, x, sol.tail[i]);
        const auto& ref = st.states[sol.terminal_match + i + 1];
        if (!state_feasible(cfg, x)) return false;
        if (!chi_close(x.chi, ref.chi, kImproverMatchTol)) return false;
        if (!dominated_by(x.c - start, ref.c, kFeasibilityTol)) return false;
        if (in_node_region(ctx.target, x, limits)) return within_anchor(ctx.target, x.chi, kAnchorArrivalTol);
        if (in_node_region(guard, x, limits)) return false;
    }
    return false;
}

LowLevelSolution fallback_candidate(const AgentState& x, const EdgeContext& ctx, const Capacity& start,
                                    const LowLevelOptions& opt, const LowLevelSolution* previous) {
    const auto& st = ctx.stored;
    const std::size_t T = st.length();
    const std::size_t H = static_cast<std::size_t>(opt.horizon);
    std::vector<ControlInput> inputs;
    std::size_t s_star = 0;
    bool exact = true;
    if (previous) {
        std::vector<ControlInput> plan(previous->inputs.begin() + 1, previous->inputs.end());
        const std::size_t own = plan.size();
        plan.insert(plan.end(), previous->tail.begin(), previous->tail.end());
        const std::size_t n = std::min(H, plan.size());
        inputs.assign(plan.begin(), plan.begin() + static_cast<std::ptrdiff_t>(n));
        s_star = previous->terminal_match + (n - std::min(n, own));
        exact = previous->exact_replay;
    } else {
        std::optional<std::size_t> at;
        for (std::size_t s = 0; s <= T; ++s) {
            if (chi_close(x.chi, st.states[s].chi, kReplayMatchTol) &&
                dominated_by(x.c - start, st.states[s].c, kFeasibilityTol)) {
                at = s;
                break;
            }
        }
        if (!at || *at == T) throw InvariantError("state is not on the stored trajectory of edge " + edge_name(ctx.edge));
        const std::size_t n = std::min(H, T - *at);
        inputs.assign(st.inputs.begin() + static_cast<std::ptrdiff_t>(*at),
                      st.inputs.begin() + static_cast<std::ptrdiff_t>(*at + n));
        s_star = *at + n;
    }
    auto sol = evaluate(x, ctx, start, std::move(inputs), s_star, exact ? kReplayMatchTol : kImproverMatchTol, 0.0);
    if (!sol) throw InvariantError("shifted fallback candidate is infeasible on edge " + edge_name(ctx.edge));
    sol->exact_replay = exact;
    sol->source = CandidateSource::Fallback;
    sol->candidate_index = 0;
    return *sol;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

class Improver {
public:
    Improver(const AgentState& x, const EdgeContext& ctx, const Capacity& start, std::size_t elapsed,
             const LowLevelOptions& opt)
        : x_(x), ctx_(ctx), start_(start), elapsed_(elapsed), opt_(opt) {}

    void run(LowLevelSolution& best) {
        const std::size_t T = ctx_.stored.length();
        const int H = opt_.horizon;
        int index = 1;

        // Reach the stored arrival directly, fewest steps first.
        for (int n = 1; n <= H && n < best.cost; ++n, ++index) {
            if (try_candidate(best, T, n, 0, 0, CandidateSource::Retimed, index)) return;
        }
        // Otherwise the farthest stored state reachable in exactly H steps.
        for (std::size_t s = T; s-- > 0; ++index) {
            if (s < elapsed_ + static_cast<std::size_t>(H)) break;
            if (H + ctx_.stored.cost_to_go[s] >= best.cost) break;
            if (try_candidate(best, s, H, 0, 0, CandidateSource::Retimed, index)) break;
        }
        shoot(best, index);
    }

private:
    bool reachable(std::size_t s, int n) const {
        const auto& cfg = ctx_.cfg;
        const auto& ref = ctx_.stored.states[s].chi;
        const double reach = cfg.v_bounds.hi * n * cfg.dt + 1e-9;
        if (std::hypot(ref.z - x_.chi.z, ref.y - x_.chi.y) > reach) return false;
        const double dv = std::max(cfg.accel_bounds.hi, -cfg.accel_bounds.lo) * n * cfg.dt + 1e-9;
        return std::abs(ref.v - x_.chi.v) <= dv;
    }

    bool try_candidate(LowLevelSolution& best, std::size_t s, int n, int extra0, int extra1, CandidateSource src,
                       int index) {
        if (!reachable(s, n)) return false;
        ConnectRequest req{x_.chi, ctx_.stored.states[s].chi, n, ctx_.cfg.v_bounds.hi, kDistanceMargin, extra0, extra1};
        auto inputs = connect(ctx_.cfg, req);
        if (!inputs) return false;
        auto sol = evaluate(x_, ctx_, start_, std::move(*inputs), s, kImproverMatchTol, kRegionEntryMargin);
        if (!sol || sol->cost >= best.cost) return false;
        if (!tail_arrives(ctx_, start_, *sol)) return false;
        sol->source = src;
        sol->candidate_index = index;
        sol->exact_replay = false;
        best = std::move(*sol);
        return true;
    }

    // Random re-timing around the incumbent: stretched turns and nearby targets.
    void shoot(LowLevelSolution& best, int index) {
        if (opt_.shoot_budget <= 0) return;
        const std::size_t T = ctx_.stored.length();
        const int H = opt_.horizon;
        std::uint64_t seed = mix(mix(mix(opt_.seed, static_cast<std::uint64_t>(ctx_.edge.from)),
                                     static_cast<std::uint64_t>(ctx_.edge.to)),
                                 elapsed_);
        std::mt19937_64 rng(seed);
        for (int b = 0; b < opt_.shoot_budget; ++b, ++index) {
            std::size_t lo = std::max<std::size_t>(best.terminal_match + 1, elapsed_ + static_cast<std::size_t>(H));
            if (lo > T) lo = T;
            std::size_t s = std::uniform_int_distribution<std::size_t>(lo, std::min(T, lo + 4))(rng);
            int n = s == T ? std::uniform_int_distribution<int>(1, H)(rng) : H;
            int e0 = std::uniform_int_distribution<int>(0, 2)(rng);
            int e1 = std::uniform_int_distribution<int>(0, 2)(rng);
            if (s < T && s < elapsed_ + static_cast<std::size_t>(H)) continue;
            if (n + ctx_.stored.cost_to_go[s] >= best.cost) continue;
            try_candidate(best, s, n, e0, e1, CandidateSource::Shooting, index);
        }
    }

    const AgentState& x_;
    const EdgeContext& ctx_;
    Capacity start_;
    std::size_t elapsed_;
    const LowLevelOptions& opt_;
};

}  // namespace

LowLevelSolution solve_low_level(const AgentState& x, const EdgeContext& ctx, const Capacity& edge_start_caps,
                                 std::size_t elapsed_steps, const LowLevelOptions& opt,
                                 const LowLevelSolution* previous) {
    if (opt.horizon < 1) throw InputError("low-level horizon must be >= 1");
    LowLevelSolution best = fallback_candidate(x, ctx, edge_start_caps, opt, previous);
    if (opt.improver && !best.terminal_in_region) {
        Improver imp(x, ctx, edge_start_caps, elapsed_steps, opt);
        imp.run(best);
    }
    return best;
}

ControlInput tail_policy(const LowLevelSolution& sol, std::size_t steps_since_t_star) {
    if (steps_since_t_star >= sol.inputs.size()) throw InvariantError("tail policy ran past the planned horizon");
    return sol.inputs[steps_since_t_star];
}

EdgeRun track_edge(const AgentState& x0, const Edge& edge, const TaskGraph& graph, const LearningStore& store,
                   const DynamicsConfig& cfg, const LowLevelOptions& opt) {
    auto it = store.low_safe_set.find(edge);
    if (it == store.low_safe_set.end()) throw InvariantError("no stored trajectory for edge " + edge_name(edge));
    const auto& stored = it->second;
    const auto& limits = cfg.capacity_limits;
    const auto theta = store.theta.at(edge);
    const NodeAnchor origin = graph.anchor(edge.from);
    const EdgeContext ctx{cfg, edge, graph.anchor(edge.to), stored};

    if (!in_node_region(origin, x0, limits))
        throw InvariantError("edge " + edge_name(edge) + " entered outside the origin region");
    if (!dominated_by(x0.c + theta, limits, kFeasibilityTol))
        throw InvariantError("edge " + edge_name(edge) + " entered with capacities above C - theta");

    EdgeRun run;
    run.edge = edge;
    run.states.push_back(x0);
    const Capacity start = x0.c;
    const std::size_t budget = 10 * std::max<std::size_t>(1, stored.length());
    std::optional<LowLevelSolution> committed;
    bool tail_mode = false;
    std::size_t tail_step = 0;

    while (!in_node_region(ctx.target, run.states.back(), limits)) {
        const std::size_t t = run.inputs.size();
        if (t >= budget) throw InvariantError("edge " + edge_name(edge) + " exceeded its step budget");
        ControlInput u;
        if (tail_mode) {
            u = tail_policy(*committed, tail_step++);
        } else {
            auto sol = solve_low_level(run.states.back(), ctx, start, t, opt, committed ? &*committed : nullptr);
            ++run.solves;
            if (sol.source != CandidateSource::Fallback) ++run.improved_solves;
            committed = std::move(sol);
            if (committed->terminal_in_region) {
                tail_mode = true;
                u = tail_policy(*committed, tail_step++);
            } else {
                u = committed->inputs.front();
            }
        }
        AgentState next = step(cfg, run.states.back(), u);
        auto report = check_constraints(cfg, next, &u, kFeasibilityTol);
        if (!report.empty())
            throw InvariantError("constraint violation (" + report.front().quantity + ") on edge " + edge_name(edge));
        run.inputs.push_back(u);
        run.states.push_back(next);
    }
    if (run.inputs.empty()) throw InvariantError("edge " + edge_name(edge) + " started inside the target region");
    if (!within_anchor(ctx.target, run.states.back().chi, kAnchorArrivalTol))
        throw InvariantError("edge " + edge_name(edge) + " arrived off the anchor");
    if (!dominated_by(run.states.back().c - start, theta, kFeasibilityTol))
        throw InvariantError("edge " + edge_name(edge) + " depleted more than theta_hat");
    return run;
}

}  // namespace hlmpc
