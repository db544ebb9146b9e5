// Random task-graph instances for property tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hlmpc/config.hpp"

namespace hlmpc::test_support {

struct RandomGraphOptions {
    int nodes = 6;
    double extent = 12.0;     // coordinates in [-extent, extent]
    double edge_prob = 0.45;  // extra edges beyond the spanning tree
};

// Headings keep every incoming approach direction at least this far from the node
// heading, so the final turn-in-place step is large enough not to latch arrival early.
inline constexpr double kApproachClearance = 0.15;

inline bool heading_clear(double heading, const std::vector<NodeSpec>& nodes, const std::vector<Edge>& edges, NodeId j) {
    for (const auto& e : edges) {
        NodeId from = e.from == j ? e.to : (e.to == j ? e.from : 0);
        if (from == 0) continue;
        const auto& a = nodes[from - 1];
        const auto& b = nodes[j - 1];
        double approach = std::atan2(b.y - a.y, b.x - a.x);
        if (std::abs(heading - approach) < kApproachClearance) return false;
    }
    return true;
}

// A bidirectional, strongly connected graph whose conservative initialization succeeds.
inline RunConfig random_instance(std::mt19937_64& rng, const RandomGraphOptions& opt = {}) {
    std::uniform_real_distribution<double> coord(-opt.extent, opt.extent);
    std::uniform_real_distribution<double> angle(-std::numbers::pi + 0.01, std::numbers::pi - 0.01);
    std::bernoulli_distribution extra(opt.edge_prob);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        RunConfig cfg;
        cfg.graph.depot = 1;
        cfg.graph.bidirectional = true;
        for (int i = 1; i <= opt.nodes; ++i) {
            double x = i == 1 ? 0.0 : std::round(2.0 * coord(rng)) / 2.0;
            double y = i == 1 ? 0.0 : std::round(2.0 * coord(rng)) / 2.0;
            cfg.graph.nodes.push_back(NodeSpec{i, x, y, 0.0});
        }
        for (int i = 2; i <= opt.nodes; ++i) {
            int parent = std::uniform_int_distribution<int>(1, i - 1)(rng);
            cfg.graph.edges.push_back(Edge{parent, i});
        }
        for (int i = 1; i <= opt.nodes; ++i)
            for (int j = i + 1; j <= opt.nodes; ++j)
                if (extra(rng) && std::find(cfg.graph.edges.begin(), cfg.graph.edges.end(), Edge{i, j}) ==
                                      cfg.graph.edges.end())
                    cfg.graph.edges.push_back(Edge{i, j});
        bool ok = true;
        for (int j = 1; j <= opt.nodes && ok; ++j) {
            int tries = 0;
            double h = angle(rng);
            while (!heading_clear(h, cfg.graph.nodes, cfg.graph.edges, j) && ++tries < 100) h = angle(rng);
            ok = tries < 100;
            cfg.graph.nodes[j - 1].heading = h;
        }
        if (!ok) continue;
        try {
            Orchestrator probe(cfg.graph.build(), cfg.dynamics, cfg.controller);
            probe.initialize();
        } catch (const ConfigError&) {
            continue;
        }
        return cfg;
    }
    throw std::runtime_error("random_instance: no valid instance found");
}

}  // namespace hlmpc::test_support
