#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cyclepatrol/engine.hpp"

namespace cyclepatrol {

struct RobotSnapshot {
    double p = 0.0;
    int o = 1;
    int a = 1;
};

struct TraceEntry {
    Event event;
    std::vector<double> y;  // post-event boundaries, NaN while unknown
    std::vector<double> e;  // post-event traversing times, NaN while undefined
    std::vector<RobotSnapshot> robots;
};

struct ParameterChange {
    double t = 0.0;
    int robot_id = 0;
    std::optional<double> v;
    std::optional<double> r;
};

struct AppliedChange {
    double t = 0.0;
    std::size_t robot = 0;
    RobotParams params;
    std::size_t entry_index = 0;  // first trace entry after the change
};

struct Trace {
    FleetConfig initial_fleet;
    std::vector<RobotSnapshot> initial_robots;
    double convergence_threshold = 1e-3;
    std::vector<TraceEntry> entries;
    std::vector<AppliedChange> changes;
    // Time of the first event from which every later event is converged.
    std::optional<double> convergence_time;

    // Fleet parameters in force after the last change.
    FleetConfig final_fleet() const {
        FleetConfig f = initial_fleet;
        for (const auto& c : changes) f.robots[c.robot] = c.params;
        return f;
    }
};

struct SimOptions {
    double tie_eps = 1e-9;
    double convergence_threshold = 1e-3;
    BoundaryRule boundary_rule = meeting_boundary;
    bool record_snapshots = true;  // per-event robot states, needed by the round lift
};

inline double max_relative_deviation(const std::vector<double>& e, double t_star) {
    double m = 0.0;
    for (double x : e) {
        if (std::isnan(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x - t_star) / t_star);
    }
    return m;
}

class Simulator {
public:
    explicit Simulator(SimState s, SimOptions opt = {}) : state_(std::move(s)), opt_(std::move(opt)) {
        trace_.initial_fleet = state_.fleet();
        trace_.convergence_threshold = opt_.convergence_threshold;
        for (const auto& r : state_.robots) trace_.initial_robots.push_back({r.p, r.o, r.a});
        t_star_ = compute_t_star(trace_.initial_fleet);
    }

    const SimState& state() const { return state_; }
    const Trace& trace() const { return trace_; }
    Trace take_trace() { return std::move(trace_); }
    double t_star() const { return t_star_; }

    Event next_event() const { return cyclepatrol::next_event(state_, opt_.tie_eps); }

    Event step() {
        auto c = detail::earliest(state_, opt_.tie_eps);
        if (!c) throw DeadlockError("no future event at t = " + std::to_string(state_.time));
        advance(state_, c->time);
        Event ev = detail::resolve(state_, *c);
        apply_event(state_, ev, opt_.boundary_rule);
        record(ev);
        return ev;
    }

    void schedule(const ParameterChange& c) {
        pending_.push_back(c);
        std::stable_sort(pending_.begin(), pending_.end(),
                         [](const ParameterChange& a, const ParameterChange& b) { return a.t < b.t; });
    }

    // Processes every event strictly before t_end, applying scheduled changes
    // on the way, and leaves the clock at t_end.
    void run_until(double t_end) {
        for (;;) {
            auto c = detail::earliest(state_, opt_.tie_eps);
            const double t_event = c ? c->time : std::numeric_limits<double>::infinity();
            if (!pending_.empty() && pending_.front().t <= t_event && pending_.front().t < t_end) {
                advance(state_, pending_.front().t);
                apply_change(pending_.front());
                pending_.erase(pending_.begin());
                continue;
            }
            if (!(t_event < t_end)) break;
            step();
        }
        advance(state_, t_end);
    }

    void run_events(std::size_t count) {
        for (std::size_t k = 0; k < count; ++k) {
            auto c = detail::earliest(state_, opt_.tie_eps);
            const double t_event = c ? c->time : std::numeric_limits<double>::infinity();
            while (!pending_.empty() && pending_.front().t <= t_event) {
                advance(state_, pending_.front().t);
                apply_change(pending_.front());
                pending_.erase(pending_.begin());
            }
            step();
        }
    }

    // Immediate change at the current clock.
    void apply_parameter_change(std::size_t robot, std::optional<double> v, std::optional<double> r) {
        if (cyclepatrol::apply_parameter_change(state_, robot, v, r)) {
            t_star_ = compute_t_star(state_.fleet());
            trace_.changes.push_back({state_.time, robot, state_.robots[robot].params, trace_.entries.size()});
            trace_.convergence_time.reset();
        }
    }

    // Drops recorded entries to bound memory on long runs; metadata stays.
    void forget_entries() {
        trace_.entries.clear();
        trace_.entries.shrink_to_fit();
        for (auto& c : trace_.changes) c.entry_index = 0;
    }

private:
    void apply_change(const ParameterChange& c) {
        std::size_t idx = state_.n();
        for (std::size_t i = 0; i < state_.n(); ++i)
            if (state_.robots[i].params.id == c.robot_id) idx = i;
        if (idx == state_.n())
            throw ValidationError("input", "parameter change names unknown robot " + std::to_string(c.robot_id));
        apply_parameter_change(idx, c.v, c.r);
    }

    void record(const Event& ev) {
        TraceEntry en;
        en.event = ev;
        en.y = state_.y_vector();
        en.e = state_.e_vector();
        if (opt_.record_snapshots) {
            en.robots.reserve(state_.n());
            for (const auto& r : state_.robots) en.robots.push_back({r.p, r.o, r.a});
        }
        const bool conv = max_relative_deviation(en.e, t_star_) < opt_.convergence_threshold;
        if (!conv) trace_.convergence_time.reset();
        else if (!trace_.convergence_time) trace_.convergence_time = ev.time;
        trace_.entries.push_back(std::move(en));
    }

    SimState state_;
    SimOptions opt_;
    Trace trace_;
    double t_star_ = 0.0;
    std::vector<ParameterChange> pending_;
};

}  // namespace cyclepatrol
