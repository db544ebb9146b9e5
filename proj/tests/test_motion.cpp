#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "hlmpc/motion.hpp"
#include "hlmpc/task_graph.hpp"

using namespace hlmpc;

namespace {

const DynamicsConfig kCfg{};

void expect_feasible(const std::vector<AgentState>& xs, const std::vector<ControlInput>& us) {
    for (std::size_t t = 0; t < xs.size(); ++t)
        EXPECT_TRUE(check_constraints(kCfg, xs[t], t < us.size() ? &us[t] : nullptr, kFeasibilityTol).empty()) << t;
}

}  // namespace

TEST(MinTurnSteps, RateLimitedStepCount) {
    EXPECT_EQ(min_turn_steps(kCfg, 0.0), 0);
    EXPECT_EQ(min_turn_steps(kCfg, 0.2), 1);
    EXPECT_EQ(min_turn_steps(kCfg, -0.21), 2);
    EXPECT_EQ(min_turn_steps(kCfg, std::numbers::pi), 16);
}

TEST(VelocityProfile, CoversDistanceWithinBounds) {
    for (int n : {62, 80, 150}) {
        auto v = velocity_profile(kCfg, 0.0, 0.0, 10.0, n, 2.0);
        ASSERT_TRUE(v) << n;
        ASSERT_EQ(v->size(), static_cast<std::size_t>(n) + 1);
        EXPECT_EQ(v->front(), 0.0);
        EXPECT_NEAR(v->back(), 0.0, 1e-12);
        double dist = 0.0;
        for (int k = 0; k < n; ++k) {
            dist += (*v)[k] * kCfg.dt;
            EXPECT_LE((*v)[k], 2.0 + 1e-12);
            EXPECT_GE((*v)[k], -1e-12);
            EXPECT_LE(std::abs((*v)[k + 1] - (*v)[k]), 2.0 * kCfg.dt + 1e-12);
        }
        EXPECT_NEAR(dist, 10.0, 1e-9);
    }
}

TEST(VelocityProfile, TooFewStepsIsInfeasible) {
    // 10 m under a 2 m/s cap needs more than 50 steps.
    EXPECT_FALSE(velocity_profile(kCfg, 0.0, 0.0, 10.0, 40, 2.0));
}

TEST(Connect, RestToRestLandsOnTarget) {
    NonCapacityState from{0, 0, 0.5, 0}, to{3, 4, -1.0, 0};
    auto us = shortest_connection(kCfg, from, to, 2.0);
    ASSERT_TRUE(us);
    auto xs = rollout(kCfg, AgentState{{0, 0}, from}, *us);
    expect_feasible(xs, *us);
    NodeAnchor target{2, to, {}};
    EXPECT_TRUE(within_anchor(target, xs.back().chi, kAnchorArrivalTol));
    for (const auto& x : xs) EXPECT_LE(x.chi.v, 2.0 + 1e-12);
    // Soc is the travelled length times alpha.
    EXPECT_NEAR(xs.back().c[kSoc], kCfg.alpha * 5.0, 1e-9);
}

TEST(Connect, ShortestUsesFewestSteps) {
    NonCapacityState from{0, 0, 0, 0}, to{10, 0, 1.0, 0};
    auto us = shortest_connection(kCfg, from, to, 2.0);
    ASSERT_TRUE(us);
    const int n = static_cast<int>(us->size());
    ConnectRequest fewer{from, to, n - 1, 2.0, 0.0, 0, 0};
    EXPECT_FALSE(connect(kCfg, fewer));
    ConnectRequest more{from, to, n + 3, 2.0, 0.0, 0, 0};
    EXPECT_TRUE(connect(kCfg, more));
}

TEST(Connect, ExtraTurnStepsKeepExactStepCount) {
    NonCapacityState from{0, 0, 0, 0}, to{6, 0, 1.0, 0};
    auto base = shortest_connection(kCfg, from, to, 5.0);
    ASSERT_TRUE(base);
    ConnectRequest req{from, to, static_cast<int>(base->size()) + 4, 5.0, 0.0, 1, 2};
    auto us = connect(kCfg, req);
    ASSERT_TRUE(us);
    EXPECT_EQ(us->size(), base->size() + 4);
    auto xs = rollout(kCfg, AgentState{{0, 0}, from}, *us);
    expect_feasible(xs, *us);
    EXPECT_TRUE(within_anchor(NodeAnchor{2, to, {}}, xs.back().chi, kAnchorArrivalTol));
}

TEST(Connect, DistanceMarginStopsShort) {
    NonCapacityState from{0, 0, 0, 0}, to{6, 0, 0.5, 0};
    auto base = shortest_connection(kCfg, from, to, 5.0);
    ASSERT_TRUE(base);
    ConnectRequest req{from, to, static_cast<int>(base->size()), 5.0, 1e-10, 0, 0};
    auto us = connect(kCfg, req);
    ASSERT_TRUE(us);
    auto xs = rollout(kCfg, AgentState{{0, 0}, from}, *us);
    EXPECT_LT(xs.back().c[kSoc], kCfg.alpha * 6.0);
    EXPECT_NEAR(xs.back().chi.z, 6.0, 1e-9);
}

TEST(Connect, ZeroStepsIsRejected) {
    EXPECT_FALSE(connect(kCfg, ConnectRequest{{0, 0, 0, 0}, {1, 0, 0, 0}, 0, 2.0, 0.0, 0, 0}));
}
