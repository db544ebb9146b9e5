#include "hlmpc/motion.hpp"

#include <algorithm>
#include <cmath>

namespace hlmpc {

namespace {

constexpr double kRestSpeed = 1e-9;
constexpr double kCollinearTol = 1e-7;
constexpr double kAngleTol = 1e-9;

std::vector<ControlInput> turn_inputs(const DynamicsConfig& cfg, double from, double to, int k) {
    std::vector<ControlInput> out;
    if (k <= 0) return out;
    double rate = (to - from) / (k * cfg.dt);
    rate = std::clamp(rate, cfg.steer_bounds.lo, cfg.steer_bounds.hi);
    out.assign(static_cast<std::size_t>(k), ControlInput{rate, 0.0});
    return out;
}

// Accelerations whose simulated velocities follow `profile`, nudged so the
// simulated value never leaves [v_lo, v_hi].
std::vector<ControlInput> track_profile(const DynamicsConfig& cfg, const std::vector<double>& profile) {
    std::vector<ControlInput> out;
    double v = profile.front();
    for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
        double a = (profile[k + 1] - v) / cfg.dt;
        a = std::clamp(a, cfg.accel_bounds.lo, cfg.accel_bounds.hi);
        while (v + a * cfg.dt < cfg.v_bounds.lo && a < cfg.accel_bounds.hi) a = std::nextafter(a, INFINITY);
        while (v + a * cfg.dt > cfg.v_bounds.hi && a > cfg.accel_bounds.lo) a = std::nextafter(a, -INFINITY);
        out.push_back(ControlInput{0.0, a});
        v = v + a * cfg.dt;
    }
    return out;
}

}  // namespace

int min_turn_steps(const DynamicsConfig& cfg, double delta) {
    if (std::abs(delta) <= 1e-12) return 0;
    double rate = delta > 0 ? cfg.steer_bounds.hi : -cfg.steer_bounds.lo;
    double k = std::ceil(std::abs(delta) / (rate * cfg.dt) - 1e-9);
    return std::max(1, static_cast<int>(k));
}

std::optional<std::vector<double>> velocity_profile(const DynamicsConfig& cfg, double v0, double vf,
                                                    double distance, int n, double speed_cap) {
    if (n < 1) return std::nullopt;
    const double up = cfg.accel_bounds.hi * cfg.dt;
    const double down = -cfg.accel_bounds.lo * cfg.dt;
    const double vmin = cfg.v_bounds.lo;
    const double cap = std::min(speed_cap, cfg.v_bounds.hi);
    constexpr double eps = 1e-12;
    if (v0 > cap + eps || vf > cap + eps || v0 < vmin - eps || vf < vmin - eps) return std::nullopt;
    if (vf > v0 + up * n + eps || vf < v0 - down * n - eps) return std::nullopt;

    std::vector<double> hi(n + 1), lo(n + 1);
    for (int k = 0; k <= n; ++k) {
        hi[k] = std::min({v0 + up * k, cap, vf + down * (n - k)});
        lo[k] = std::max({v0 - down * k, vmin, vf - up * (n - k)});
    }
    hi[0] = lo[0] = v0;
    hi[n] = lo[n] = vf;
    double d_hi = 0.0, d_lo = 0.0;
    for (int k = 0; k < n; ++k) {
        d_hi += hi[k] * cfg.dt;
        d_lo += lo[k] * cfg.dt;
    }
    if (distance > d_hi + eps || distance < d_lo - eps) return std::nullopt;
    double span = d_hi - d_lo;
    double lambda = span > 1e-15 ? std::clamp((distance - d_lo) / span, 0.0, 1.0) : 1.0;
    std::vector<double> v(n + 1);
    for (int k = 0; k <= n; ++k) v[k] = lo[k] + lambda * (hi[k] - lo[k]);
    return v;
}

std::optional<std::vector<ControlInput>> connect(const DynamicsConfig& cfg, const ConnectRequest& req) {
    const auto& a = req.from;
    const auto& b = req.to;
    if (req.steps < 1) return std::nullopt;
    const double dx = b.z - a.z;
    const double dy = b.y - a.y;
    const double dist = std::hypot(dx, dy);
    const bool moving0 = a.v > kRestSpeed;
    const bool moving1 = b.v > kRestSpeed;

    if (dist <= 1e-12) {
        if (moving0 || moving1) return std::nullopt;
        if (min_turn_steps(cfg, b.theta - a.theta) > req.steps) return std::nullopt;
        return turn_inputs(cfg, a.theta, b.theta, req.steps);
    }

    double heading = moving0 ? a.theta : (moving1 ? b.theta : std::atan2(dy, dx));
    if (moving0 && moving1 && std::abs(a.theta - b.theta) > kAngleTol) return std::nullopt;
    const double cx = std::cos(heading), cy = std::sin(heading);
    const double forward = cx * dx + cy * dy;
    const double lateral = cx * dy - cy * dx;
    if (std::abs(lateral) > kCollinearTol || forward < -1e-12) return std::nullopt;

    int k1 = 0, k2 = 0;
    if (!moving0) {
        k1 = min_turn_steps(cfg, heading - a.theta);
        if (k1 > 0) k1 += req.extra_start_turn_steps;
    }
    if (!moving1) {
        k2 = min_turn_steps(cfg, b.theta - heading);
        if (k2 > 0) k2 += req.extra_end_turn_steps;
    }
    const int nl = req.steps - k1 - k2;
    if (nl < 1) return std::nullopt;
    const double distance = std::max(0.0, forward - req.distance_margin);
    auto profile = velocity_profile(cfg, a.v, b.v, distance, nl, req.speed_cap);
    if (!profile) return std::nullopt;

    std::vector<ControlInput> out = turn_inputs(cfg, a.theta, heading, k1);
    auto mid = track_profile(cfg, *profile);
    out.insert(out.end(), mid.begin(), mid.end());
    auto tail = turn_inputs(cfg, heading, b.theta, k2);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

std::optional<std::vector<ControlInput>> shortest_connection(const DynamicsConfig& cfg, const NonCapacityState& from,
                                                             const NonCapacityState& to, double speed_cap,
                                                             int max_steps) {
    const double dist = std::hypot(to.z - from.z, to.y - from.y);
    const double cap = std::min(speed_cap, cfg.v_bounds.hi);
    int lower = 1;
    if (dist > 1e-12) {
        double heading = std::atan2(to.y - from.y, to.z - from.z);
        lower = min_turn_steps(cfg, heading - from.theta) + min_turn_steps(cfg, to.theta - heading) +
                static_cast<int>(std::floor(dist / (cap * cfg.dt)));
    }
    for (int n = std::max(1, lower); n <= max_steps; ++n) {
        ConnectRequest req{from, to, n, cap, 0.0, 0, 0};
        if (auto u = connect(cfg, req)) return u;
    }
    return std::nullopt;
}

}  // namespace hlmpc
