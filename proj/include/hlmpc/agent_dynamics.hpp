/**
 * @file agent_dynamics.hpp
 * @brief Discrete-time kinematic agent with separable capacity dynamics.
 *
 * chi = (z, y, theta, v), u = (steer_rate, accel). Capacities advance by
 * (alpha * v * dt, dt) per step and never feed back into chi.
 */
#pragma once

#include <string>
#include <vector>

#include "hlmpc/types.hpp"

namespace hlmpc {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct DynamicsConfig {
    double dt = 0.1;
    double alpha = 1.6;
    Capacity capacity_limits{100.0, 120.0};
    Interval theta_bounds{-3.141592653589793, 3.141592653589793};
    Interval v_bounds{0.0, 5.0};
    Interval steer_bounds{-2.0, 2.0};
    Interval accel_bounds{-2.0, 2.0};
    double init_velocity_cap = 2.0;
};

struct Violation {
    std::string quantity;
    double value = 0.0;
    double margin = 0.0;  ///< distance outside the bound, > 0
};

using ViolationReport = std::vector<Violation>;

AgentState step(const DynamicsConfig& cfg, const AgentState& x, const ControlInput& u);

std::vector<AgentState> rollout(const DynamicsConfig& cfg, const AgentState& x0,
                                const std::vector<ControlInput>& inputs);

/// Bounds are closed; a violation is reported only when it exceeds `slack`.
ViolationReport check_constraints(const DynamicsConfig& cfg, const AgentState& x, const ControlInput* u = nullptr,
                                  double slack = 0.0);

bool state_feasible(const DynamicsConfig& cfg, const AgentState& x, double slack = kFeasibilityTol);
bool input_feasible(const DynamicsConfig& cfg, const ControlInput& u, double slack = kFeasibilityTol);

/// Returns an error string when the config boxes are empty or dt/alpha are invalid.
std::vector<std::string> validate(const DynamicsConfig& cfg);

}  // namespace hlmpc
