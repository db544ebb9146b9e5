#pragma once

#include <string>
#include <vector>

#include "hlmpc/orchestrator.hpp"

namespace hlmpc {

struct GraphSpec {
    std::vector<NodeSpec> nodes;
    std::vector<Edge> edges;  ///< as written; expanded when bidirectional
    bool bidirectional = true;
    NodeId depot = 1;
    NodeTolerance tolerance{};

    TaskGraph build() const;
};

struct RunSection {
    int iterations = 5;
    std::string out_dir = "out";
};

struct RunConfig {
    std::string description;
    GraphSpec graph;
    DynamicsConfig dynamics;
    ControllerOptions controller;
    RunSection run;
};

/// Parses and validates; throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

/// Serialises every semantic field; parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const RunConfig& cfg);

}  // namespace hlmpc
