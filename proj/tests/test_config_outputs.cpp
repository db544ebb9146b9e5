#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hlmpc/config.hpp"
#include "hlmpc/outputs.hpp"

using namespace hlmpc;
namespace fs = std::filesystem;

namespace {

const std::string kBundled = std::string(HLMPC_SOURCE_DIR) + "/configs/example7.json";

const char* kMinimal = R"({
  "graph": {
    "nodes": [{"id": 1, "x": 0, "y": 0, "heading": 0}, {"id": 2, "x": 5, "y": 0, "heading": 0}],
    "edges": [[1, 2]],
    "depot": 1
  }
})";

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "test.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("hlmpc_test_" + name);
    fs::remove_all(p);
    return p;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Config, BundledConfigLoadsWithDefaults) {
    auto cfg = load_config(kBundled);
    EXPECT_EQ(cfg.graph.nodes.size(), 7u);
    EXPECT_EQ(cfg.graph.depot, 1);
    EXPECT_EQ(cfg.dynamics.dt, 0.1);
    EXPECT_EQ(cfg.dynamics.alpha, 1.6);
    EXPECT_EQ(cfg.dynamics.capacity_limits, (Capacity{100, 120}));
    EXPECT_EQ(cfg.dynamics.init_velocity_cap, 2.0);
    EXPECT_EQ(cfg.controller.horizon_high, 3);
    EXPECT_EQ(cfg.controller.horizon_low, 15);
    EXPECT_TRUE(cfg.controller.improver);
    EXPECT_EQ(cfg.run.iterations, 5);
    EXPECT_EQ(cfg.graph.build().edges().size(), 20u);
}

TEST(Config, MinimalConfigUsesDefaults) {
    auto cfg = parse_config(kMinimal);
    EXPECT_TRUE(cfg.graph.bidirectional);
    EXPECT_EQ(cfg.graph.tolerance.position, 0.05);
    EXPECT_EQ(cfg.run.out_dir, "out");
}

TEST(Config, RejectsZeroTimeStep) {
    std::string text = kMinimal;
    text.insert(text.rfind('}'), R"(, "dynamics": {"dt": 0})");
    EXPECT_NE(error_of(text).find("dt"), std::string::npos);
}

TEST(Config, NamesAMissingDepot) {
    std::string text = R"({"graph": {"nodes": [{"id": 1, "x": 0, "y": 0}], "edges": []}})";
    EXPECT_NE(error_of(text).find("graph.depot: missing required field"), std::string::npos);
}

TEST(Config, ReportsEveryProblem) {
    std::string text = R"({"graph": {"nodes": [{"id": 1, "x": 0, "y": 0}], "edges": []},
                          "controller": {"horizon_high": 0, "shoot_budget": -2}})";
    auto msg = error_of(text);
    EXPECT_NE(msg.find("3 problem(s)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("graph.depot"), std::string::npos);
    EXPECT_NE(msg.find("controller.horizon_high"), std::string::npos);
    EXPECT_NE(msg.find("controller.shoot_budget"), std::string::npos);
}

TEST(Config, ParseErrorsCarryLineAndColumn) {
    auto msg = error_of("{\n  \"graph\": {\n    \"nodes\": [,]\n  }\n}");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("test.json"), std::string::npos);
}

TEST(Config, UnknownFieldsAreErrors) {
    std::string text = kMinimal;
    text.insert(text.rfind('}'), R"(, "controler": {})");
    EXPECT_NE(error_of(text).find("config.controler: unknown field"), std::string::npos);
}

TEST(Config, RoundTrip) {
    auto cfg = load_config(kBundled);
    auto text = config_to_json(cfg);
    auto again = parse_config(text);
    EXPECT_EQ(config_to_json(again), text);
    EXPECT_EQ(again.description, cfg.description);
    EXPECT_EQ(again.graph.edges.size(), cfg.graph.edges.size());
}

TEST(Config, MissingFileIsAConfigError) { EXPECT_THROW(load_config("/nonexistent/cfg.json"), ConfigError); }

TEST(Outputs, SummaryHasOneRowPerIteration) {
    auto cfg = load_config(kBundled);
    Orchestrator o(cfg.graph.build(), cfg.dynamics, cfg.controller);
    o.run(5);
    auto dir = scratch("summary");
    emit_outputs(o, dir, true);
    auto summary = read_all(dir / "summary.csv");
    EXPECT_EQ(line_count(summary), 7u);
    EXPECT_EQ(summary.substr(0, summary.find('\n')), "iteration,tasks,total_soc,total_time");
    std::istringstream rows(summary);
    std::string row;
    std::getline(rows, row);
    int prev = -1;
    while (std::getline(rows, row)) {
        int tasks = std::stoi(row.substr(row.find(',') + 1));
        EXPECT_GE(tasks, prev);
        prev = tasks;
    }
    for (int r = 0; r <= 5; ++r) {
        for (const std::string stem : {"iteration_", "edges_", "theta_", "learning_"}) {
            auto ext = stem == "iteration_" || stem == "edges_" || stem == "theta_" ? ".csv" : ".json";
            EXPECT_TRUE(fs::exists(dir / (stem + std::to_string(r) + ext))) << stem << r;
        }
        EXPECT_TRUE(fs::exists(dir / ("plans_" + std::to_string(r) + ".json")));
    }
    const auto traj = read_all(dir / "iteration_1.csv");
    EXPECT_EQ(line_count(traj), o.state().archive[1].states.size() + 1);
    fs::remove_all(dir);
}

TEST(Outputs, RerunsAreByteIdentical) {
    auto cfg = load_config(kBundled);
    std::vector<std::string> bytes;
    for (int run = 0; run < 2; ++run) {
        Orchestrator o(cfg.graph.build(), cfg.dynamics, cfg.controller);
        o.run(2);
        auto dir = scratch("rerun" + std::to_string(run));
        emit_outputs(o, dir, true);
        std::string all;
        for (const auto& name : {"summary.csv", "iteration_2.csv", "plans_2.json", "learning_2.json", "theta_2.csv"})
            all += read_all(dir / name);
        bytes.push_back(all);
        fs::remove_all(dir);
    }
    EXPECT_EQ(bytes[0], bytes[1]);
}

TEST(Outputs, EmptyArchiveIsRejected) {
    auto cfg = load_config(kBundled);
    Orchestrator o(cfg.graph.build(), cfg.dynamics, cfg.controller);
    EXPECT_THROW(emit_outputs(o, scratch("empty"), false), InputError);
}

TEST(Outputs, WriteFailureNamesThePath) {
    auto cfg = load_config(kBundled);
    Orchestrator o(cfg.graph.build(), cfg.dynamics, cfg.controller);
    o.initialize();
    auto blocker = scratch("blocker");
    std::ofstream(blocker) << "x";
    try {
        emit_outputs(o, blocker / "sub", false);
        FAIL() << "expected an I/O error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos) << e.what();
    }
    fs::remove_all(blocker);
}
