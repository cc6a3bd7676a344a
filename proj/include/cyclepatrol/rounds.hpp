#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cyclepatrol/fleet.hpp"
#include "cyclepatrol/simulator.hpp"
#include "cyclepatrol/words.hpp"

namespace cyclepatrol {

struct RoundRobot {
    double p = 0.0;        // goal contact point it is at or heading to
    int o = 1;
    double t_event = 0.0;  // latest boundary arrival, seconds after t0
};

struct RoundState {
    std::size_t k = 0;
    double t0 = 0.0;
    FleetConfig fleet;
    GoalPartition goal;
    std::vector<RoundRobot> robots;

    std::size_t n() const { return robots.size(); }
    double t_star() const { return goal.t_star; }

    OrientationWord word() const {
        std::vector<int> o;
        for (const auto& r : robots) o.push_back(r.o);
        return OrientationWord(std::move(o));
    }

    double left_goal(std::size_t i) const { return i == 0 ? 0.0 : goal.y_star[i - 1]; }
    double contact_point(std::size_t i, int o) const {
        const double r = fleet.robots[i].r;
        return o == 1 ? goal.y_star[i] - r : left_goal(i) + r;
    }
};

struct Meeting {
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t boundary = 0;
    double time = 0.0;  // absolute
};

struct LiftOptions {
    std::optional<double> after_time;  // search for t0 from here (default: convergence)
    double window_rounds = 2.0;
};

// First trace entry from which every later entry has max |e - t*| / t* < tol.
inline std::optional<std::size_t> converged_from(const Trace& tr, double t_star, double tol) {
    std::optional<std::size_t> from;
    for (std::size_t k = tr.entries.size(); k-- > 0;) {
        if (max_relative_deviation(tr.entries[k].e, t_star) < tol) from = k;
        else break;
    }
    return from;
}

// Builds the round-0 state at t0, the midpoint of the widest event-free gap
// in a window after convergence.
inline RoundState lift_from_trace(const Trace& tr, const FleetConfig& fleet, double tolerance,
                                  const LiftOptions& opt = {}) {
    RoundState rs;
    rs.fleet = fleet;
    rs.goal = compute_goal_partition(fleet);
    const double ts = rs.goal.t_star;
    const std::size_t n = fleet.size();
    auto from = converged_from(tr, ts, tolerance);
    if (!from) throw ValidationError("input", "trace is not converged");
    const auto& es = tr.entries;
    double start = es[*from].event.time;
    if (opt.after_time) start = std::max(start, *opt.after_time);
    const double stop = start + opt.window_rounds * ts;

    std::optional<std::size_t> before;  // entry preceding the widest gap
    double widest = 0.0;
    for (std::size_t k = *from; k + 1 < es.size(); ++k) {
        if (es[k].event.time < start) continue;
        if (es[k].event.time > stop) break;
        const double gap = es[k + 1].event.time - es[k].event.time;
        if (gap > widest) {
            widest = gap;
            before = k;
        }
    }
    if (!before || widest <= 0.0) throw ValidationError("input", "no event-free gap after convergence");
    const TraceEntry& en = es[*before];
    rs.t0 = 0.5 * (en.event.time + es[*before + 1].event.time);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& snap = en.robots[i];
        const auto& par = fleet.robots[i];
        RoundRobot rr;
        rr.o = snap.o;
        rr.p = rs.contact_point(i, snap.o);
        if (snap.a == 0) {
            rr.t_event = 0.0;
        } else {
            const double p = snap.p + par.v * snap.o * (rs.t0 - en.event.time);
            const double yl = i == 0 ? 0.0 : en.y[i - 1];
            const double yr = en.y[i];
            const double d = snap.o == 1 ? yr - par.r - p : p - par.r - yl;
            rr.t_event = std::max(d, 0.0) / par.v;
        }
        if (rr.t_event >= ts) throw ValidationError("input", "arrival beyond the first round; trace not converged");
        rs.robots.push_back(rr);
    }
    return rs;
}

// Pair (i, i+1) meets when both sit on the contact points of goal boundary i.
inline bool meets_by_position(const RoundState& s, std::size_t i, double tol = 1e-9) {
    const std::size_t n = s.n(), j = (i + 1) % n;
    const double L = s.fleet.length;
    const double yi = s.goal.y_star[i];
    const double right_i = s.robots[i].p + s.fleet.robots[i].r;
    double left_j = s.robots[j].p - s.fleet.robots[j].r;
    if (j == 0) left_j += L;
    const double scale = tol * std::max(1.0, L);
    return std::abs(right_i - yi) <= scale && std::abs(left_j - yi) <= scale;
}

inline bool meets_by_orientation(const RoundState& s, std::size_t i) {
    return s.robots[i].o == 1 && s.robots[(i + 1) % s.n()].o == -1;
}

struct RoundStep {
    RoundState state;
    std::vector<Meeting> meetings;
    std::size_t formulation_mismatches = 0;  // position test disagreed with orientation test
};

inline RoundStep step_round(const RoundState& s) {
    RoundStep out;
    out.state = s;
    const std::size_t n = s.n();
    for (std::size_t i = 0; i < n; ++i) {
        const bool by_pos = meets_by_position(s, i);
        if (by_pos != meets_by_orientation(s, i)) ++out.formulation_mismatches;
        if (!by_pos) continue;
        const std::size_t j = (i + 1) % n;
        const double t = std::max(s.robots[i].t_event, s.robots[j].t_event);
        out.meetings.push_back({i, j, i, s.t0 + t});
        for (std::size_t q : {i, j}) {
            auto& r = out.state.robots[q];
            r.t_event = t + s.t_star();
            r.o = -r.o;
            r.p = s.contact_point(q, r.o);
        }
    }
    ++out.state.k;
    return out;
}

struct SyncReport {
    bool ok = true;
    double max_error = 0.0;
    std::optional<std::size_t> robot;  // first violation
    std::optional<std::size_t> round;
};

// For k >= k0 + n/2 every t_event must equal (k - k0) t* + max_j t_event_j(k0).
inline SyncReport check_synchronization(const std::vector<RoundState>& states, std::size_t k0, double tol = 1e-9) {
    SyncReport rep;
    const RoundState* base = nullptr;
    for (const auto& s : states)
        if (s.k == k0) base = &s;
    if (!base) throw ValidationError("input", "round k0 not among the states");
    double mx = base->robots.front().t_event;
    for (const auto& r : base->robots) mx = std::max(mx, r.t_event);
    const std::size_t settle = k0 + base->n() / 2;
    for (const auto& s : states) {
        if (s.k < settle) continue;
        const double want = static_cast<double>(s.k - k0) * s.t_star() + mx;
        for (std::size_t i = 0; i < s.n(); ++i) {
            const double err = std::abs(s.robots[i].t_event - want);
            rep.max_error = std::max(rep.max_error, err);
            if (err > tol && rep.ok) {
                rep.ok = false;
                rep.robot = i;
                rep.round = s.k;
            }
        }
    }
    return rep;
}

struct RoundRow {
    std::size_t round = 0;
    std::size_t meetings = 0;
    std::size_t n_bal = 0;
    bool interlaced = false;
    double max_event_offset = 0.0;  // latest arrival within the round, seconds after its start
};

struct RoundRun {
    std::vector<RoundState> states;  // states[k] is round k
    std::vector<std::vector<Meeting>> meetings;
    std::vector<RoundRow> rows;
    std::size_t formulation_mismatches = 0;
};

inline RoundRun run_rounds(const RoundState& s0, std::size_t rounds) {
    RoundRun run;
    run.states.push_back(s0);
    for (std::size_t k = 0; k < rounds; ++k) {
        const RoundState& cur = run.states.back();
        RoundRow row;
        row.round = cur.k;
        row.n_bal = cur.word().n_bal();
        row.interlaced = is_interlaced(cur.word()).interlaced;
        double mx = 0.0;
        for (const auto& r : cur.robots) mx = std::max(mx, r.t_event);
        row.max_event_offset = mx - static_cast<double>(cur.k) * cur.t_star();
        auto st = step_round(cur);
        row.meetings = st.meetings.size();
        run.formulation_mismatches += st.formulation_mismatches;
        run.rows.push_back(row);
        run.meetings.push_back(std::move(st.meetings));
        run.states.push_back(std::move(st.state));
    }
    return run;
}

struct RoundEngineComparison {
    std::size_t model_meetings = 0;
    std::size_t engine_meetings = 0;
    std::size_t unmatched = 0;
    double max_time_error = 0.0;
    double max_position_error = 0.0;
    bool ok(double tol) const {
        return unmatched == 0 && model_meetings == engine_meetings && max_time_error <= tol &&
               max_position_error <= tol;
    }
};

// Matches every round-model meeting with an engine meeting at the same
// boundary; positions compare the realised boundary with the goal boundary.
inline RoundEngineComparison compare_with_trace(const Trace& tr, const RoundRun& run) {
    RoundEngineComparison cmp;
    const RoundState& s0 = run.states.front();
    const double t_end = s0.t0 + static_cast<double>(run.meetings.size()) * s0.t_star();
    std::vector<const TraceEntry*> engine;
    for (const auto& en : tr.entries)
        if (en.event.kind == EventKind::meeting && en.event.time > s0.t0 && en.event.time < t_end)
            engine.push_back(&en);
    cmp.engine_meetings = engine.size();
    std::vector<bool> used(engine.size(), false);
    for (const auto& round : run.meetings)
        for (const auto& m : round) {
            ++cmp.model_meetings;
            std::optional<std::size_t> best;
            double best_dt = 0.0;
            for (std::size_t q = 0; q < engine.size(); ++q) {
                if (used[q] || engine[q]->event.boundary != m.boundary) continue;
                const double dt = std::abs(engine[q]->event.time - m.time);
                if (!best || dt < best_dt) {
                    best = q;
                    best_dt = dt;
                }
            }
            if (!best) {
                ++cmp.unmatched;
                continue;
            }
            used[*best] = true;
            cmp.max_time_error = std::max(cmp.max_time_error, best_dt);
            const double y = engine[*best]->y[m.boundary];
            cmp.max_position_error = std::max(cmp.max_position_error, std::abs(y - s0.goal.y_star[m.boundary]));
        }
    return cmp;
}

}  // namespace cyclepatrol
