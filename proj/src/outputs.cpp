#include "hlmpc/outputs.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace hlmpc {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string trajectory_csv(const IterationRecord& rec) {
    std::string s = "t,soc,time,z,y,theta,v,steer_rate,accel\n";
    for (std::size_t t = 0; t < rec.states.size(); ++t) {
        const auto& x = rec.states[t];
        s += std::to_string(t) + "," + num(x.c[kSoc]) + "," + num(x.c[kTime]) + "," + num(x.chi.z) + "," +
             num(x.chi.y) + "," + num(x.chi.theta) + "," + num(x.chi.v) + ",";
        if (t < rec.inputs.size()) s += num(rec.inputs[t].steer_rate) + "," + num(rec.inputs[t].accel);
        else s += ",";
        s += "\n";
    }
    return s;
}

json caps_json(const Capacity& c) { return json::array({c[kSoc], c[kTime]}); }

json record_json(const IterationRecord& rec, const IterationMetrics& m) {
    json events = json::array();
    for (const auto& e : rec.events) events.push_back({{"k", e.k}, {"t", e.time}, {"node", e.node}});
    return {{"iteration", rec.iteration},
            {"complete", rec.complete},
            {"tasks", m.tasks},
            {"total_soc", m.total_soc},
            {"total_time", m.total_time},
            {"steps", rec.inputs.size()},
            {"low_level_solves", m.low_level_solves},
            {"improved_solves", m.improved_solves},
            {"node_sequence", rec.node_sequence()},
            {"events", events}};
}

std::string theta_csv(const ThetaEstimate& theta) {
    std::string s = "from,to,soc,time\n";
    for (const auto& [e, c] : theta.values)
        s += std::to_string(e.from) + "," + std::to_string(e.to) + "," + num(c[kSoc]) + "," + num(c[kTime]) + "\n";
    return s;
}

std::string edges_csv(const IterationRecord& rec) {
    std::string s = "from,to,t0,tf,steps,omega_soc,omega_time\n";
    for (const auto& tr : traversals(rec)) {
        Capacity w = tr.states.back().c - tr.states.front().c;
        s += std::to_string(tr.edge.from) + "," + std::to_string(tr.edge.to) + "," + std::to_string(tr.range.t0) +
             "," + std::to_string(tr.range.tf) + "," + std::to_string(tr.inputs.size()) + "," + num(w[kSoc]) + "," +
             num(w[kTime]) + "\n";
    }
    return s;
}

json plans_json(const std::vector<PlanTrace>& traces) {
    json out = json::array();
    for (const auto& p : traces) {
        json caps = json::array();
        for (const auto& c : p.plan.predicted_caps) caps.push_back(caps_json(c));
        out.push_back({{"k", p.k},
                       {"node", p.at.node},
                       {"caps", caps_json(p.at.c)},
                       {"path", p.plan.path},
                       {"predicted_caps", caps},
                       {"terminal_entry", p.plan.terminal_entry},
                       {"objective", p.plan.objective},
                       {"fallback_objective", p.fallback_objective}});
    }
    return out;
}

json learning_json(const std::vector<HighSafeSetEntry>& high, const LowSafeSet& low) {
    json entries = json::array();
    for (const auto& e : high)
        entries.push_back({{"source_iteration", e.source_iteration},
                           {"event_index", e.event_index},
                           {"node", e.node},
                           {"cap_ceiling", caps_json(e.cap_ceiling)},
                           {"suffix_nodes", e.suffix_nodes},
                           {"suffix_task_count", e.suffix_task_count},
                           {"next_entry", e.next_entry}});
    json edges = json::array();
    for (const auto& [edge, st] : low)
        edges.push_back({{"from", edge.from},
                         {"to", edge.to},
                         {"source_iteration", st.source_iteration},
                         {"length", st.length()},
                         {"cost_to_go", st.cost_to_go.empty() ? 0 : st.cost_to_go.front()},
                         {"final_caps", caps_json(st.states.back().c)}});
    return {{"high_safe_set", entries}, {"low_safe_set", edges}};
}

}  // namespace

void emit_outputs(const Orchestrator& orch, const std::filesystem::path& out_dir, bool dump_learning) {
    const auto& st = orch.state();
    if (st.archive.empty()) throw InputError("nothing to emit: the archive is empty");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

    std::string summary = "iteration,tasks,total_soc,total_time\n";
    for (const auto& m : st.metrics)
        summary += std::to_string(m.iteration) + "," + std::to_string(m.tasks) + "," + num(m.total_soc) + "," +
                   num(m.total_time) + "\n";
    write_file(out_dir / "summary.csv", summary);

    const auto& limits = orch.dynamics().capacity_limits;
    const NodeId depot = orch.graph().depot();
    LowSafeSet low = st.initial_trajectories;
    for (std::size_t r = 0; r < st.archive.size(); ++r) {
        const auto& rec = st.archive[r];
        const std::string tag = std::to_string(rec.iteration);
        write_file(out_dir / ("iteration_" + tag + ".csv"), trajectory_csv(rec));
        write_file(out_dir / ("iteration_" + tag + ".json"), record_json(rec, st.metrics[r]).dump(2) + "\n");
        write_file(out_dir / ("edges_" + tag + ".csv"), edges_csv(rec));
        write_file(out_dir / ("plans_" + tag + ".json"), plans_json(st.plan_traces[r]).dump(2) + "\n");
        if (r < st.learning.theta_history.size())
            write_file(out_dir / ("theta_" + tag + ".csv"), theta_csv(st.learning.theta_history[r]));
        if (dump_learning) {
            // Rebuild the stores as they stood right after this iteration's update.
            low = update_low_safe_set(std::move(low), rec, orch.graph(), limits);
            std::vector<IterationRecord> prefix(st.archive.begin(), st.archive.begin() + r + 1);
            std::vector<ThetaEstimate> hist(st.learning.theta_history.begin(),
                                            st.learning.theta_history.begin() + r + 1);
            auto high = build_high_safe_set(prefix, hist, limits, depot);
            write_file(out_dir / ("learning_" + tag + ".json"), learning_json(high, low).dump(2) + "\n");
        }
    }
}

}  // namespace hlmpc
