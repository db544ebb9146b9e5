#pragma once

#include <optional>
#include <vector>

#include "hlmpc/agent_dynamics.hpp"

namespace hlmpc {

// Turn-in-place / straight-line / turn-in-place input construction. Used by the
// conservative initialization and by the low-level re-timing candidates.

/// Fewest steps to rotate by `delta` radians at the steering-rate bound.
int min_turn_steps(const DynamicsConfig& cfg, double delta);

/// Velocity samples v_0..v_n moving `distance` in n steps from v0 to vf, with
/// |dv| bounded by the acceleration box and v within [v_bounds.lo, speed_cap].
/// Interpolates between the fastest and slowest admissible profiles.
std::optional<std::vector<double>> velocity_profile(const DynamicsConfig& cfg, double v0, double vf,
                                                    double distance, int n, double speed_cap);

struct ConnectRequest {
    NonCapacityState from{};
    NonCapacityState to{};
    int steps = 0;
    double speed_cap = 0.0;
    double distance_margin = 0.0;  ///< stop this far short of `to` along the travel line
    int extra_start_turn_steps = 0;
    int extra_end_turn_steps = 0;
};

/// Exactly `steps` inputs steering `from` to `to`, or nullopt when the pair is not
/// connectable by a turn-straight-turn manoeuvre in that many steps.
std::optional<std::vector<ControlInput>> connect(const DynamicsConfig& cfg, const ConnectRequest& req);

/// Shortest turn-straight-turn input sequence between two resting poses under `speed_cap`.
std::optional<std::vector<ControlInput>> shortest_connection(const DynamicsConfig& cfg, const NonCapacityState& from,
                                                             const NonCapacityState& to, double speed_cap,
                                                             int max_steps = 200000);

}  // namespace hlmpc
