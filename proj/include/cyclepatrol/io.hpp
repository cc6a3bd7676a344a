#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyclepatrol/consensus.hpp"
#include "cyclepatrol/fleet.hpp"
#include "cyclepatrol/metrics.hpp"
#include "cyclepatrol/rounds.hpp"
#include "cyclepatrol/scenario.hpp"
#include "cyclepatrol/simulator.hpp"
#include "cyclepatrol/words.hpp"

namespace cyclepatrol {

using json = nlohmann::json;

// Fixed 9 fractional digits; NaN becomes an empty field.
inline std::string fmt9(double x) {
    if (std::isnan(x)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", x == 0.0 ? 0.0 : x);
    return buf;
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("input", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("input", path + ": " + e.what());
    }
}

template <class T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError("input", where + ": missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("input", where + ": bad \"" + key + "\"");
    }
}

inline TaskSet parse_tasks(const json& j) {
    TaskSet ts;
    if (!j.contains("tasks") || !j["tasks"].is_array()) throw ValidationError("input", "expected a \"tasks\" array");
    for (const auto& t : j["tasks"])
        ts.tasks.push_back({field<int>(t, "id", "task"), {field<double>(t, "x", "task"), field<double>(t, "y", "task")}});
    validate_tasks(ts);
    return ts;
}

inline json to_json(const CycleGraph& g) {
    json wp = json::array();
    for (std::size_t s = 0; s < g.waypoints.size(); ++s)
        wp.push_back({{"task_id", g.task_ids[s]}, {"x", g.waypoints[s].x}, {"y", g.waypoints[s].y}});
    return {{"waypoints", wp}, {"cumulative_lengths", g.cumulative_lengths}, {"total_length", g.total_length}};
}

struct Scenario {
    FleetConfig fleet;
    std::optional<std::vector<double>> p0;
    std::optional<std::vector<int>> o0;
    std::vector<ParameterChange> events;
};

inline Scenario parse_scenario(const json& j) {
    Scenario sc;
    sc.fleet.length = field<double>(j, "L", "fleet");
    if (!j.contains("robots") || !j["robots"].is_array()) throw ValidationError("input", "expected a \"robots\" array");
    std::vector<double> p;
    std::vector<int> o;
    for (const auto& r : j["robots"]) {
        sc.fleet.robots.push_back({field<int>(r, "id", "robot"), field<double>(r, "v", "robot"),
                                   field<double>(r, "r", "robot")});
        if (r.contains("p0")) p.push_back(field<double>(r, "p0", "robot"));
        if (r.contains("o0")) o.push_back(field<int>(r, "o0", "robot"));
    }
    const std::size_t n = sc.fleet.size();
    if (!p.empty()) {
        if (p.size() != n) throw ValidationError("input", "p0 must be given for every robot or none");
        sc.p0 = p;
    }
    if (!o.empty()) {
        if (o.size() != n) throw ValidationError("input", "o0 must be given for every robot or none");
        sc.o0 = o;
    }
    if (j.contains("events"))
        for (const auto& e : j["events"]) {
            ParameterChange c;
            c.t = field<double>(e, "t", "event");
            c.robot_id = field<int>(e, "robot", "event");
            if (e.contains("v")) c.v = field<double>(e, "v", "event");
            if (e.contains("r")) c.r = field<double>(e, "r", "event");
            sc.events.push_back(c);
        }
    validate_fleet(sc.fleet);
    return sc;
}

inline void write_trace_csv(std::ostream& os, const Trace& tr) {
    const auto& robots = tr.initial_fleet.robots;
    os << "time,kind,robot_a,robot_b,boundary_index,y_value,e_a,e_b\n";
    for (const auto& en : tr.entries) {
        const auto& ev = en.event;
        os << fmt9(ev.time) << ',' << to_string(ev.kind) << ',' << robots[ev.robot_a].id << ',';
        if (ev.robot_b) os << robots[*ev.robot_b].id;
        os << ',' << ev.boundary + 1 << ',' << fmt9(en.y[ev.boundary]) << ',' << fmt9(en.e[ev.robot_a]) << ',';
        if (ev.robot_b) os << fmt9(en.e[*ev.robot_b]);
        os << '\n';
    }
}

inline json to_json(const TheoremCheck& c) {
    return {{"name", c.name},
            {"verdict", to_string(c.verdict)},
            {"predicted", c.predicted},
            {"measured", c.measured},
            {"max_relative_error", c.max_relative_error},
            {"samples", c.samples}};
}

inline json to_json(const PerformanceReport& r) {
    json j;
    j["t_star"] = r.t_star;
    j["n"] = r.n;
    j["n_plus"] = r.n_plus;
    j["n_minus"] = r.n_minus;
    j["n_bal"] = r.n_bal;
    j["balanced"] = r.balanced;
    j["convergence_threshold"] = r.convergence_threshold;
    j["tolerance"] = r.tolerance;
    j["convergence_time"] = r.convergence_time ? json(*r.convergence_time) : json(nullptr);
    j["steady_start"] = r.steady_start ? json(*r.steady_start) : json(nullptr);
    j["final_e"] = r.final_e;
    j["predicted_revisit_time"] = r.balanced ? 2.0 * r.t_star
                                             : static_cast<double>(r.n) * r.t_star / static_cast<double>(r.n_bal);
    json th = json::array();
    for (const auto& c : r.theorems) th.push_back(to_json(c));
    j["theorems"] = th;
    json meetings = json::array();
    for (std::size_t b = 0; b < r.f.size(); ++b)
        meetings.push_back({{"boundary", b + 1}, {"intervals", r.f[b].size()}});
    j["boundaries"] = meetings;
    return j;
}

// One row per meeting: the left robot's traversing time and its boundary's
// inter-meeting time and windowed average when available.
inline void write_plot_csv(std::ostream& os, const Trace& tr, const PerformanceReport& rep) {
    os << "time,robot,e_i,f_i,windowed_f_i\n";
    const auto& robots = tr.initial_fleet.robots;
    std::vector<std::size_t> fk(rep.f.size(), 0), wk(rep.windowed.size(), 0);
    for (const auto& en : tr.entries) {
        if (en.event.kind != EventKind::meeting) continue;
        const std::size_t b = en.event.boundary;
        const double t = en.event.time;
        double f = NAN, w = NAN;
        if (fk[b] < rep.f[b].size() && rep.f[b][fk[b]].time == t) f = rep.f[b][fk[b]++].value;
        if (wk[b] < rep.windowed[b].size() && rep.windowed[b][wk[b]].time == t) w = rep.windowed[b][wk[b]++].value;
        os << fmt9(t) << ',' << robots[en.event.robot_a].id << ',' << fmt9(en.e[en.event.robot_a]) << ',' << fmt9(f)
           << ',' << fmt9(w) << '\n';
    }
}

inline void write_rounds_csv(std::ostream& os, const std::vector<RoundRow>& rows) {
    os << "round,meetings,n_bal,interlaced,max_event_offset\n";
    for (const auto& r : rows)
        os << r.round << ',' << r.meetings << ',' << r.n_bal << ',' << (r.interlaced ? "true" : "false") << ','
           << fmt9(r.max_event_offset) << '\n';
}

inline void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows) {
    os << "round,sequence_id,length\n";
    for (const auto& r : rows) os << r.round << ',' << r.sequence_id << ',' << r.length << '\n';
}

inline json to_json(const SpectrumReport& s, std::optional<double> fixed_point_error = {}) {
    json links = json::array();
    for (const auto& l : s.links)
        links.push_back({{"link", l.link + 1},
                         {"eigenvalues", l.eigenvalues},
                         {"symmetry_error", l.symmetry_error},
                         {"ok", l.ok}});
    json j{{"links", links},
           {"product_spectral_radius", s.product_spectral_radius},
           {"product_spectral_norm", s.product_spectral_norm},
           {"primitive", s.primitive},
           {"ok", s.ok}};
    j["fixed_point_error"] = fixed_point_error ? json(*fixed_point_error) : json(nullptr);
    if (!s.diagnostic.empty()) j["diagnostic"] = s.diagnostic;
    return j;
}

}  // namespace cyclepatrol
