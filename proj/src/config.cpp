#include "hlmpc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hlmpc {

using nlohmann::json;

TaskGraph GraphSpec::build() const { return TaskGraph::create(nodes, edges, bidirectional, depot, tolerance); }

namespace {

class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& where, const std::string& what) { errors.push_back(where + ": " + what); }

    const json* section(const json& root, const std::string& key, bool required) {
        if (!root.contains(key)) {
            if (required) fail(key, "missing required field");
            return nullptr;
        }
        if (!root[key].is_object()) {
            fail(key, "must be an object");
            return nullptr;
        }
        return &root[key];
    }

    void unknown_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!allowed.count(it.key())) fail(where + "." + it.key(), "unknown field");
    }

    void number(const json& obj, const std::string& key, const std::string& where, double& out) {
        if (!obj.contains(key)) return;
        if (!obj[key].is_number()) return fail(where + "." + key, "must be a number");
        out = obj[key].get<double>();
    }

    void integer(const json& obj, const std::string& key, const std::string& where, int& out) {
        if (!obj.contains(key)) return;
        if (!obj[key].is_number_integer()) return fail(where + "." + key, "must be an integer");
        out = obj[key].get<int>();
    }

    void interval(const json& obj, const std::string& key, const std::string& where, Interval& out) {
        if (!obj.contains(key)) return;
        const auto& v = obj[key];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            return fail(where + "." + key, "must be [lo, hi]");
        out = Interval{v[0].get<double>(), v[1].get<double>()};
    }
};

void read_graph(Reader& rd, const json& g, GraphSpec& out) {
    rd.unknown_keys(g, "graph", {"nodes", "edges", "bidirectional", "depot", "node_tolerance"});
    if (!g.contains("nodes")) {
        rd.fail("graph.nodes", "missing required field");
    } else if (!g["nodes"].is_array()) {
        rd.fail("graph.nodes", "must be an array");
    } else {
        for (std::size_t k = 0; k < g["nodes"].size(); ++k) {
            const auto& n = g["nodes"][k];
            const std::string where = "graph.nodes[" + std::to_string(k) + "]";
            if (!n.is_object()) {
                rd.fail(where, "must be an object");
                continue;
            }
            rd.unknown_keys(n, where, {"id", "x", "y", "heading"});
            NodeSpec s;
            if (!n.contains("id") || !n.contains("x") || !n.contains("y"))
                rd.fail(where, "id, x and y are required");
            rd.integer(n, "id", where, s.id);
            rd.number(n, "x", where, s.x);
            rd.number(n, "y", where, s.y);
            rd.number(n, "heading", where, s.heading);
            out.nodes.push_back(s);
        }
    }
    if (!g.contains("edges")) {
        rd.fail("graph.edges", "missing required field");
    } else if (!g["edges"].is_array()) {
        rd.fail("graph.edges", "must be an array");
    } else {
        for (std::size_t k = 0; k < g["edges"].size(); ++k) {
            const auto& e = g["edges"][k];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
                rd.fail("graph.edges[" + std::to_string(k) + "]", "must be [from, to]");
                continue;
            }
            out.edges.push_back(Edge{e[0].get<int>(), e[1].get<int>()});
        }
    }
    if (g.contains("bidirectional")) {
        if (!g["bidirectional"].is_boolean())
            rd.fail("graph.bidirectional", "must be a boolean");
        else
            out.bidirectional = g["bidirectional"].get<bool>();
    }
    if (!g.contains("depot"))
        rd.fail("graph.depot", "missing required field");
    else
        rd.integer(g, "depot", "graph", out.depot);
    if (g.contains("node_tolerance")) {
        const auto& t = g["node_tolerance"];
        if (t.is_number()) {
            double v = t.get<double>();
            out.tolerance = NodeTolerance{v, v, v};
        } else if (t.is_object()) {
            rd.unknown_keys(t, "graph.node_tolerance", {"position", "heading", "velocity"});
            rd.number(t, "position", "graph.node_tolerance", out.tolerance.position);
            rd.number(t, "heading", "graph.node_tolerance", out.tolerance.heading);
            rd.number(t, "velocity", "graph.node_tolerance", out.tolerance.velocity);
        } else {
            rd.fail("graph.node_tolerance", "must be a number or an object");
        }
    }
}

void read_dynamics(Reader& rd, const json& d, DynamicsConfig& out) {
    rd.unknown_keys(d, "dynamics",
                    {"dt", "alpha", "capacity_limits", "chi_bounds", "input_bounds", "init_velocity_cap", "theta_prior"});
    rd.number(d, "dt", "dynamics", out.dt);
    rd.number(d, "alpha", "dynamics", out.alpha);
    rd.number(d, "init_velocity_cap", "dynamics", out.init_velocity_cap);
    if (d.contains("capacity_limits")) {
        const auto& c = d["capacity_limits"];
        if (!c.is_array() || c.size() != kCapacityCount || !c[0].is_number() || !c[1].is_number())
            rd.fail("dynamics.capacity_limits", "must be [soc_limit, time_limit]");
        else
            out.capacity_limits = Capacity{c[0].get<double>(), c[1].get<double>()};
    }
    if (d.contains("chi_bounds")) {
        if (!d["chi_bounds"].is_object()) {
            rd.fail("dynamics.chi_bounds", "must be an object");
        } else {
            rd.unknown_keys(d["chi_bounds"], "dynamics.chi_bounds", {"theta", "v"});
            rd.interval(d["chi_bounds"], "theta", "dynamics.chi_bounds", out.theta_bounds);
            rd.interval(d["chi_bounds"], "v", "dynamics.chi_bounds", out.v_bounds);
        }
    }
    if (d.contains("input_bounds")) {
        if (!d["input_bounds"].is_object()) {
            rd.fail("dynamics.input_bounds", "must be an object");
        } else {
            rd.unknown_keys(d["input_bounds"], "dynamics.input_bounds", {"steer_rate", "accel"});
            rd.interval(d["input_bounds"], "steer_rate", "dynamics.input_bounds", out.steer_bounds);
            rd.interval(d["input_bounds"], "accel", "dynamics.input_bounds", out.accel_bounds);
        }
    }
    if (d.contains("theta_prior") && !d["theta_prior"].is_object())
        rd.fail("dynamics.theta_prior", "must be an object");
    for (const auto& e : validate(out)) rd.fail("dynamics", e);
    if (!(out.init_velocity_cap > out.v_bounds.lo) || out.init_velocity_cap > out.v_bounds.hi)
        rd.fail("dynamics.init_velocity_cap", "must lie in (v_min, v_max]");
}

void read_controller(Reader& rd, const json& c, ControllerOptions& out) {
    rd.unknown_keys(c, "controller", {"horizon_high", "horizon_low", "improver", "shoot_budget", "seed"});
    rd.integer(c, "horizon_high", "controller", out.horizon_high);
    rd.integer(c, "horizon_low", "controller", out.horizon_low);
    rd.integer(c, "shoot_budget", "controller", out.shoot_budget);
    if (c.contains("improver")) {
        if (!c["improver"].is_boolean())
            rd.fail("controller.improver", "must be a boolean");
        else
            out.improver = c["improver"].get<bool>();
    }
    if (c.contains("seed")) {
        if (!c["seed"].is_number_unsigned())
            rd.fail("controller.seed", "must be a non-negative integer");
        else
            out.seed = c["seed"].get<std::uint64_t>();
    }
    if (out.horizon_high < 1) rd.fail("controller.horizon_high", "must be >= 1");
    if (out.horizon_low < 1) rd.fail("controller.horizon_low", "must be >= 1");
    if (out.shoot_budget < 0) rd.fail("controller.shoot_budget", "must be >= 0");
}

void read_run(Reader& rd, const json& r, RunSection& out) {
    rd.unknown_keys(r, "run", {"iterations", "out_dir"});
    rd.integer(r, "iterations", "run", out.iterations);
    if (r.contains("out_dir")) {
        if (!r["out_dir"].is_string())
            rd.fail("run.out_dir", "must be a string");
        else
            out.out_dir = r["out_dir"].get<std::string>();
    }
    if (out.iterations < 0) rd.fail("run.iterations", "must be >= 0");
}

std::string line_info(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < text.size() && k + 1 < byte; ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": parse error at " + line_info(text, e.byte) + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");

    Reader rd;
    RunConfig cfg;
    rd.unknown_keys(root, "config", {"description", "graph", "dynamics", "controller", "run"});
    if (root.contains("description")) {
        if (root["description"].is_string())
            cfg.description = root["description"].get<std::string>();
        else
            rd.fail("description", "must be a string");
    }
    if (const json* g = rd.section(root, "graph", true)) read_graph(rd, *g, cfg.graph);
    if (const json* d = rd.section(root, "dynamics", false)) read_dynamics(rd, *d, cfg.dynamics);
    else for (const auto& e : validate(cfg.dynamics)) rd.fail("dynamics", e);
    if (const json* c = rd.section(root, "controller", false)) read_controller(rd, *c, cfg.controller);
    if (const json* r = rd.section(root, "run", false)) read_run(rd, *r, cfg.run);

    if (rd.errors.empty()) {
        try {
            (void)cfg.graph.build();
        } catch (const ConfigError& e) {
            std::istringstream lines(e.what());
            for (std::string line; std::getline(lines, line);) rd.errors.push_back(line);
        }
    }
    if (!rd.errors.empty()) {
        std::ostringstream os;
        os << origin << ": " << rd.errors.size() << " problem(s)";
        for (const auto& e : rd.errors) os << "\n  " << e;
        throw ConfigError(os.str());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string config_to_json(const RunConfig& cfg) {
    json nodes = json::array();
    for (const auto& n : cfg.graph.nodes) nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}, {"heading", n.heading}});
    json edges = json::array();
    for (const auto& e : cfg.graph.edges) edges.push_back({e.from, e.to});
    const auto& d = cfg.dynamics;
    json root = {
        {"graph",
         {{"nodes", nodes},
          {"edges", edges},
          {"bidirectional", cfg.graph.bidirectional},
          {"depot", cfg.graph.depot},
          {"node_tolerance",
           {{"position", cfg.graph.tolerance.position},
            {"heading", cfg.graph.tolerance.heading},
            {"velocity", cfg.graph.tolerance.velocity}}}}},
        {"dynamics",
         {{"dt", d.dt},
          {"alpha", d.alpha},
          {"capacity_limits", {d.capacity_limits[0], d.capacity_limits[1]}},
          {"chi_bounds", {{"theta", {d.theta_bounds.lo, d.theta_bounds.hi}}, {"v", {d.v_bounds.lo, d.v_bounds.hi}}}},
          {"input_bounds",
           {{"steer_rate", {d.steer_bounds.lo, d.steer_bounds.hi}},
            {"accel", {d.accel_bounds.lo, d.accel_bounds.hi}}}},
          {"init_velocity_cap", d.init_velocity_cap}}},
        {"controller",
         {{"horizon_high", cfg.controller.horizon_high},
          {"horizon_low", cfg.controller.horizon_low},
          {"improver", cfg.controller.improver},
          {"shoot_budget", cfg.controller.shoot_budget},
          {"seed", cfg.controller.seed}}},
        {"run", {{"iterations", cfg.run.iterations}, {"out_dir", cfg.run.out_dir}}},
    };
    if (!cfg.description.empty()) root["description"] = cfg.description;
    return root.dump(2) + "\n";
}

}  // namespace hlmpc
