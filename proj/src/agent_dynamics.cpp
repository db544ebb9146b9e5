#include "hlmpc/agent_dynamics.hpp"

#include <cmath>

namespace hlmpc {

AgentState step(const DynamicsConfig& cfg, const AgentState& x, const ControlInput& u) {
    const double dt = cfg.dt;
    const auto& s = x.chi;
    AgentState n;
    n.chi.z = s.z + s.v * std::cos(s.theta) * dt;
    n.chi.y = s.y + s.v * std::sin(s.theta) * dt;
    n.chi.theta = s.theta + u.steer_rate * dt;
    n.chi.v = s.v + u.accel * dt;
    n.c[kSoc] = x.c[kSoc] + cfg.alpha * s.v * dt;
    n.c[kTime] = x.c[kTime] + dt;
    return n;
}

std::vector<AgentState> rollout(const DynamicsConfig& cfg, const AgentState& x0,
                                const std::vector<ControlInput>& inputs) {
    std::vector<AgentState> out;
    out.reserve(inputs.size() + 1);
    out.push_back(x0);
    for (const auto& u : inputs) out.push_back(step(cfg, out.back(), u));
    return out;
}

namespace {

void check_interval(ViolationReport& rep, const char* name, double value, double lo, double hi, double slack) {
    if (std::isnan(value)) {
        rep.push_back({name, value, INFINITY});
    } else if (value < lo - slack) {
        rep.push_back({name, value, lo - value});
    } else if (value > hi + slack) {
        rep.push_back({name, value, value - hi});
    }
}

}  // namespace

ViolationReport check_constraints(const DynamicsConfig& cfg, const AgentState& x, const ControlInput* u,
                                  double slack) {
    ViolationReport rep;
    check_interval(rep, "soc", x.c[kSoc], 0.0, cfg.capacity_limits[kSoc], slack);
    check_interval(rep, "time", x.c[kTime], 0.0, cfg.capacity_limits[kTime], slack);
    check_interval(rep, "z", x.chi.z, -INFINITY, INFINITY, slack);
    check_interval(rep, "y", x.chi.y, -INFINITY, INFINITY, slack);
    check_interval(rep, "theta", x.chi.theta, cfg.theta_bounds.lo, cfg.theta_bounds.hi, slack);
    check_interval(rep, "v", x.chi.v, cfg.v_bounds.lo, cfg.v_bounds.hi, slack);
    if (u) {
        check_interval(rep, "steer_rate", u->steer_rate, cfg.steer_bounds.lo, cfg.steer_bounds.hi, slack);
        check_interval(rep, "accel", u->accel, cfg.accel_bounds.lo, cfg.accel_bounds.hi, slack);
    }
    return rep;
}

bool state_feasible(const DynamicsConfig& cfg, const AgentState& x, double slack) {
    return check_constraints(cfg, x, nullptr, slack).empty();
}

bool input_feasible(const DynamicsConfig& cfg, const ControlInput& u, double slack) {
    AgentState dummy;
    return check_constraints(cfg, dummy, &u, slack).empty();
}

std::vector<std::string> validate(const DynamicsConfig& cfg) {
    std::vector<std::string> errors;
    if (!(cfg.dt > 0.0)) errors.push_back("dynamics.dt: must be > 0");
    if (!(cfg.alpha >= 0.0)) errors.push_back("dynamics.alpha: must be >= 0");
    for (std::size_t l = 0; l < kCapacityCount; ++l)
        if (!(cfg.capacity_limits[l] > 0.0)) errors.push_back("dynamics.capacity_limits: entries must be > 0");
    auto box = [&](const Interval& i, const char* name) {
        if (!(i.lo <= i.hi)) errors.push_back(std::string("dynamics.") + name + ": empty interval");
    };
    box(cfg.theta_bounds, "chi_bounds.theta");
    box(cfg.v_bounds, "chi_bounds.v");
    box(cfg.steer_bounds, "input_bounds.steer_rate");
    box(cfg.accel_bounds, "input_bounds.accel");
    if (cfg.v_bounds.lo > 0.0) errors.push_back("dynamics.chi_bounds.v: lower bound must allow v = 0 at node anchors");
    if (!(cfg.steer_bounds.lo < 0.0 && cfg.steer_bounds.hi > 0.0))
        errors.push_back("dynamics.input_bounds.steer_rate: must contain both turning directions");
    if (!(cfg.accel_bounds.lo < 0.0 && cfg.accel_bounds.hi > 0.0))
        errors.push_back("dynamics.input_bounds.accel: must allow both acceleration and braking");
    if (!(cfg.init_velocity_cap > 0.0 && cfg.init_velocity_cap <= cfg.v_bounds.hi))
        errors.push_back("dynamics.init_velocity_cap: must lie in (0, v upper bound]");
    return errors;
}

}  // namespace hlmpc
