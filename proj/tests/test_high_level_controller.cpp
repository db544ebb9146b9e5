#include <gtest/gtest.h>

#include <random>

#include "hlmpc/config.hpp"
#include "hlmpc/oracle.hpp"
#include "support/random_graphs.hpp"
#include "support/synthetic.hpp"

using namespace hlmpc;
using namespace hlmpc::test_support;

namespace {

const Capacity kLimits{100, 120};

TaskGraph graph_of(int n, std::vector<Edge> edges) {
    std::vector<NodeSpec> nodes;
    for (int i = 1; i <= n; ++i) nodes.push_back({i, 3.0 * i, 0.0, 0.0});
    return TaskGraph::create(nodes, std::move(edges), true, 1, {});
}

// Square 1-2-3-4 with a side node 5 reachable from 2.
TaskGraph square() { return graph_of(5, {{1, 2}, {2, 3}, {3, 4}, {4, 1}, {2, 5}, {5, 1}}); }

}  // namespace

TEST(HighLevel, CostlyEdgeChangesTheChosenRoute) {
    auto g = square();
    auto cheap = uniform_theta(g, {10, 10});
    auto costly = uniform_theta(g, {10, 10}, {{{2, 5}, {70, 10}}, {{5, 2}, {70, 10}}});
    for (const auto* th : {&costly, &cheap}) {
        auto L = store_from_routes(g, *th, {{1, 2, 3, 4, 1}}, kLimits);
        PlannerInputs in{g, L, kLimits};
        auto plan = solve_high_level({1, {0, 0}}, {}, in, 5);
        EXPECT_TRUE(validate_plan(plan, {1, {0, 0}}, {}, in, 5).empty());
        if (th == &costly) {
            // Reaching 5 costs 110 on the 4-task route, so the stored 3-task route is the best.
            EXPECT_EQ(plan.objective, 3);
            EXPECT_EQ(plan.path, (std::vector<NodeId>{1, 2}));
        } else {
            EXPECT_EQ(plan.objective, 4);
            EXPECT_EQ(plan.path, (std::vector<NodeId>{1, 4, 3, 2, 5, 1}));
        }
        EXPECT_EQ(plan.objective, brute_force_route(g, *th, kLimits).tasks);
    }
}

TEST(HighLevel, ShortHorizonUsesTheSafeSetSuffix) {
    auto g = square();
    auto th = uniform_theta(g, {10, 10});
    auto L = store_from_routes(g, th, {{1, 2, 3, 4, 1}}, kLimits);
    PlannerInputs in{g, L, kLimits};
    auto plan = solve_high_level({1, {0, 0}}, {}, in, 1);
    EXPECT_EQ(plan.path, (std::vector<NodeId>{1, 2}));
    EXPECT_EQ(plan.objective, 3);
    const auto& term = L.high_safe_set.at(plan.terminal_entry);
    EXPECT_EQ(term.node, 2);
    EXPECT_EQ(term.suffix_nodes, (std::vector<NodeId>{3, 4, 1}));
    EXPECT_EQ(plan.predicted_caps, (std::vector<Capacity>{{0, 0}, {10, 10}}));
}

TEST(HighLevel, TerminalSuffixMayNotRevisit) {
    auto g = square();
    auto th = uniform_theta(g, {10, 10});
    auto L = store_from_routes(g, th, {{1, 2, 3, 4, 1}}, kLimits);
    PlannerInputs in{g, L, kLimits};
    // At 2 with 3 already visited: the stored suffix 3-4-1 is unusable.
    auto plan = solve_high_level({2, {10, 10}}, {2, 3}, in, 1);
    EXPECT_EQ(plan.path, (std::vector<NodeId>{2, 1}));
    EXPECT_EQ(plan.objective, 0);
    auto deeper = solve_high_level({2, {10, 10}}, {2, 3}, in, 2);
    EXPECT_EQ(deeper.path, (std::vector<NodeId>{2, 5, 1}));
    EXPECT_EQ(deeper.objective, 1);
}

TEST(HighLevel, LexicographicTieBreak) {
    auto g = graph_of(3, {{1, 2}, {1, 3}, {2, 3}});
    auto th = uniform_theta(g, {5, 5});
    auto L = store_from_routes(g, th, {{1, 3, 2, 1}, {1, 2, 3, 1}}, kLimits);
    PlannerInputs in{g, L, kLimits};
    auto plan = solve_high_level({1, {0, 0}}, {}, in, 1);
    EXPECT_EQ(plan.path, (std::vector<NodeId>{1, 2}));
    EXPECT_EQ(plan.objective, 2);
}

TEST(HighLevel, ZeroEdgePlanWhenNothingIsAffordable) {
    auto g = graph_of(2, {{1, 2}});
    auto small = uniform_theta(g, {5, 5});
    auto L = store_from_routes(g, small, {{1, 2, 1}}, kLimits);
    L.theta = uniform_theta(g, {150, 5});
    PlannerInputs in{g, L, kLimits};
    auto plan = solve_high_level({1, {0, 0}}, {}, in, 3);
    EXPECT_EQ(plan.path, (std::vector<NodeId>{1}));
    EXPECT_EQ(plan.objective, 0);
    EXPECT_EQ(L.high_safe_set.at(plan.terminal_entry).node, 1);
    EXPECT_THROW(next_node(plan), InputError);
}

TEST(HighLevel, NoAdmissiblePlanAwayFromTheDepot) {
    auto g = graph_of(2, {{1, 2}});
    auto L = store_from_routes(g, uniform_theta(g, {5, 5}), {{1, 2, 1}}, kLimits);
    PlannerInputs in{g, L, kLimits};
    EXPECT_THROW(solve_high_level({2, {99, 5}}, {2}, in, 3), PlanningError);
    EXPECT_THROW(solve_high_level({1, {0, 0}}, {}, in, 0), InputError);
}

TEST(HighLevel, NextNode) {
    HighLevelPlan p;
    p.path = {3, 4, 2};
    EXPECT_EQ(next_node(p), 4);
}

TEST(HighLevel, FallbackShiftsAndExtendsFromTheStoredSuffix) {
    auto cfg = load_config(std::string(HLMPC_SOURCE_DIR) + "/configs/example7.json");
    auto g = cfg.graph.build();
    auto th = uniform_theta(g, {5, 5});
    auto L = store_from_routes(g, th, {{1, 6, 3, 4, 2, 7, 1}}, kLimits);
    PlannerInputs in{g, L, kLimits};
    auto plan = solve_high_level({3, {10, 10}}, {6, 3}, in, 3);
    EXPECT_EQ(plan.objective, 3);
    auto fb = fallback_plan(plan, {15, 15}, in);
    EXPECT_EQ(fb.path.front(), plan.path[1]);
    EXPECT_EQ(fb.path.size(), plan.path.size());
    EXPECT_EQ(fb.predicted_caps.front(), (Capacity{15, 15}));
    EXPECT_EQ(fb.objective, plan.objective - 1);
    EXPECT_TRUE(validate_plan(fb, {plan.path[1], {15, 15}}, {6, 3, plan.path[1]}, in, 3).empty());
}

TEST(HighLevel, FallbackNamedExample) {
    auto cfg = load_config(std::string(HLMPC_SOURCE_DIR) + "/configs/example7.json");
    auto g = cfg.graph.build();
    auto th = uniform_theta(g, {5, 5});
    auto L = store_from_routes(g, th, {{1, 6, 3, 4, 2, 7, 1}}, kLimits);
    PlannerInputs in{g, L, kLimits};
    auto entry_at = [&](NodeId n) {
        for (int i = 0; i < static_cast<int>(L.high_safe_set.size()); ++i)
            if (L.high_safe_set[i].node == n && L.high_safe_set[i].event_index > 0) return i;
        return -1;
    };
    HighLevelPlan p;
    p.path = {3, 4, 2};
    p.predicted_caps = {{10, 10}, {15, 15}, {20, 20}};
    p.terminal_entry = entry_at(2);
    p.objective = 4;
    auto fb = fallback_plan(p, {15, 15}, in);
    EXPECT_EQ(fb.path, (std::vector<NodeId>{4, 2, 7}));
    EXPECT_EQ(fb.terminal_entry, entry_at(7));
    EXPECT_EQ(fb.predicted_caps, (std::vector<Capacity>{{15, 15}, {20, 20}, {25, 25}}));
    EXPECT_EQ(fb.objective, 2);
    auto fb2 = fallback_plan(fb, {20, 20}, in);
    EXPECT_EQ(fb2.path, (std::vector<NodeId>{2, 7, 1}));
    EXPECT_EQ(fb2.terminal_entry, entry_at(1));
    EXPECT_EQ(fb2.objective, 1);
    // Terminal already at the depot: nothing to append.
    auto fb3 = fallback_plan(fb2, {25, 25}, in);
    EXPECT_EQ(fb3.path, (std::vector<NodeId>{7, 1}));
    EXPECT_EQ(fb3.terminal_entry, fb2.terminal_entry);
}

TEST(HighLevel, ReplayPlanFollowsTheRecord) {
    auto g = square();
    auto th = uniform_theta(g, {10, 10});
    auto L = store_from_routes(g, th, {{1, 2, 3, 4, 1}}, kLimits);
    PlannerInputs in{g, L, kLimits};
    auto rec = synthetic_record(0, {1, 2, 3, 4, 1}, std::vector<Capacity>(4, {10, 10}));
    auto p = replay_plan(rec, in, 2);
    EXPECT_EQ(p.path, (std::vector<NodeId>{1, 2, 3}));
    EXPECT_EQ(p.objective, 3);
    EXPECT_EQ(L.high_safe_set.at(p.terminal_entry).event_index, 2);
    EXPECT_EQ(replay_plan(rec, in, 9).path, (std::vector<NodeId>{1, 2, 3, 4, 1}));
}

TEST(HighLevel, PlanMatrixMarksEdges) {
    HighLevelPlan p;
    p.path = {1, 2, 3};
    auto u = plan_matrix(p, 3);
    int ones = 0;
    for (const auto& row : u)
        for (int v : row) ones += v;
    EXPECT_EQ(ones, 2);
    EXPECT_EQ(u[1][2], 1);
    EXPECT_EQ(u[2][3], 1);
    EXPECT_EQ(u[2][1], 0);
}

TEST(HighLevel, ValidatorFlagsTamperedPlans) {
    auto g = square();
    auto th = uniform_theta(g, {10, 10});
    auto L = store_from_routes(g, th, {{1, 2, 3, 4, 1}}, kLimits);
    PlannerInputs in{g, L, kLimits};
    auto plan = solve_high_level({1, {0, 0}}, {}, in, 2);
    ASSERT_TRUE(validate_plan(plan, {1, {0, 0}}, {}, in, 2).empty());
    auto bad_edge = plan;
    bad_edge.path[1] = 3;
    EXPECT_FALSE(validate_plan(bad_edge, {1, {0, 0}}, {}, in, 2).empty());
    auto too_long = plan;
    EXPECT_FALSE(validate_plan(too_long, {1, {0, 0}}, {}, in, 1).empty());
    auto wrong_caps = plan;
    wrong_caps.predicted_caps[1][kSoc] = 9.0;
    EXPECT_FALSE(validate_plan(wrong_caps, {1, {0, 0}}, {}, in, 2).empty());
    EXPECT_FALSE(validate_plan(plan, {1, {0, 0}}, {plan.path[1]}, in, 2).empty());
    auto inflated = plan;
    ++inflated.objective;
    EXPECT_FALSE(validate_plan(inflated, {1, {0, 0}}, {}, in, 2).empty());
}

TEST(HighLevel, FullHorizonMatchesBruteForceOnRandomGraphs) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        auto cfg = random_instance(rng, {5, 10.0, 0.5});
        Orchestrator o(cfg.graph.build(), cfg.dynamics, cfg.controller);
        o.initialize();
        const auto& L = o.state().learning;
        PlannerInputs in{o.graph(), L, cfg.dynamics.capacity_limits};
        auto plan = solve_high_level({1, {0, 0}}, {}, in, o.graph().node_count());
        auto oracle = brute_force_route(o.graph(), L.theta, cfg.dynamics.capacity_limits);
        EXPECT_EQ(plan.objective, oracle.tasks) << "trial " << trial;
    }
}
