#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace hlmpc {

/// Node identifiers are 1-based, matching the config file.
using NodeId = int;

/// Capacity coordinates of the agent model: index 0 = state of charge used, 1 = elapsed time.
inline constexpr std::size_t kCapacityCount = 2;
inline constexpr std::size_t kSoc = 0;
inline constexpr std::size_t kTime = 1;

using Capacity = std::array<double, kCapacityCount>;

struct NonCapacityState {
    double z = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v = 0.0;

    bool operator==(const NonCapacityState&) const = default;
};

struct AgentState {
    Capacity c{};
    NonCapacityState chi{};

    bool operator==(const AgentState&) const = default;
};

struct ControlInput {
    double steer_rate = 0.0;
    double accel = 0.0;

    bool operator==(const ControlInput&) const = default;
};

struct Edge {
    NodeId from = 0;
    NodeId to = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Invalid configuration or malformed input data (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A guarantee that should hold by construction was broken (CLI exit code 2).
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to a query (unknown node, out-of-range index).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// State outside every node region where a node is required.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Shared numeric tolerances.
inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kReplayMatchTol = 1e-6;
inline constexpr double kImproverMatchTol = 0.02;
inline constexpr double kAnchorArrivalTol = 1e-6;
/// New trajectories keep every pre-arrival state this far outside the target region.
inline constexpr double kRegionEntryMargin = 1e-6;

inline Capacity operator+(const Capacity& a, const Capacity& b) {
    Capacity r{};
    for (std::size_t l = 0; l < kCapacityCount; ++l) r[l] = a[l] + b[l];
    return r;
}

inline Capacity operator-(const Capacity& a, const Capacity& b) {
    Capacity r{};
    for (std::size_t l = 0; l < kCapacityCount; ++l) r[l] = a[l] - b[l];
    return r;
}

/// Component-wise a <= b + tol.
inline bool dominated_by(const Capacity& a, const Capacity& b, double tol = 0.0) {
    for (std::size_t l = 0; l < kCapacityCount; ++l)
        if (a[l] > b[l] + tol) return false;
    return true;
}

std::string edge_name(const Edge& e);

}  // namespace hlmpc
