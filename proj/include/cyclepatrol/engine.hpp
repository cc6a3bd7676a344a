#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cyclepatrol/errors.hpp"
#include "cyclepatrol/fleet.hpp"

namespace cyclepatrol {

enum class EventKind { discovery, catch_up, arrival, meeting };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::discovery: return "discovery";
        case EventKind::catch_up: return "catch";
        case EventKind::arrival: return "arrival";
        case EventKind::meeting: return "meeting";
    }
    return "?";
}

enum class Phase { discovering, patrolling };

struct RobotState {
    RobotParams params;
    double p = 0.0;
    int o = 1;
    int a = 1;
};

// Boundary b sits between robot b and robot b+1; the last one is the seam
// between robot n-1 and robot 0 and stays at L. All indices are 0-based.
struct SimState {
    double length = 0.0;
    double time = 0.0;
    std::vector<RobotState> robots;
    std::vector<std::optional<double>> boundaries;

    std::size_t n() const { return robots.size(); }
    std::size_t seam() const { return robots.size() - 1; }

    std::optional<double> left_boundary(std::size_t i) const {
        return i == 0 ? std::optional<double>(0.0) : boundaries[i - 1];
    }
    std::optional<double> right_boundary(std::size_t i) const { return boundaries[i]; }

    Phase phase(std::size_t i) const {
        return left_boundary(i) && right_boundary(i) ? Phase::patrolling : Phase::discovering;
    }

    bool all_known() const {
        return std::all_of(boundaries.begin(), boundaries.end(), [](const auto& y) { return y.has_value(); });
    }

    std::optional<double> traversing_time(std::size_t i) const {
        auto l = left_boundary(i), r = right_boundary(i);
        if (!l || !r) return std::nullopt;
        return cyclepatrol::traversing_time(*r - *l, robots[i].params);
    }

    std::vector<double> y_vector() const {
        std::vector<double> y;
        for (const auto& b : boundaries) y.push_back(b.value_or(std::numeric_limits<double>::quiet_NaN()));
        return y;
    }

    std::vector<double> e_vector() const {
        std::vector<double> e;
        for (std::size_t i = 0; i < n(); ++i)
            e.push_back(traversing_time(i).value_or(std::numeric_limits<double>::quiet_NaN()));
        return e;
    }

    FleetConfig fleet() const {
        FleetConfig f;
        f.length = length;
        for (const auto& r : robots) f.robots.push_back(r.params);
        return f;
    }

    // Value of boundary b as seen from `side` (0 = robot b, 1 = robot b+1).
    std::optional<double> boundary_value(std::size_t b, int side) const {
        if (b == seam()) return side == 0 ? length : 0.0;
        return boundaries[b];
    }
};

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::arrival;
    std::size_t robot_a = 0;               // arriving robot, catcher, or left robot of the pair
    std::optional<std::size_t> robot_b;    // partner
    std::size_t boundary = 0;
};

inline SimState init(const FleetConfig& fleet, const std::vector<double>& p0, const std::vector<int>& o0) {
    validate_fleet(fleet);
    const std::size_t n = fleet.size();
    if (p0.size() != n || o0.size() != n)
        throw ValidationError("input", "need one initial position and orientation per robot");
    for (int o : o0)
        if (o != 1 && o != -1) throw ValidationError("input", "orientations must be +1 or -1");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(p0[i])) throw ValidationError("input", "non-finite initial position");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(p0[i] < p0[i + 1])) throw ValidationError("A3", "initial positions are not sorted along the cycle");
    const auto& rb = fleet.robots;
    if (p0[0] - rb[0].r < 0.0 || p0[n - 1] + rb[n - 1].r > fleet.length)
        throw ValidationError("A3", "a communication zone crosses the 0/L seam");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (p0[i] + rb[i].r > p0[i + 1] - rb[i + 1].r)
            throw ValidationError("A3", "communication zones of robots " + std::to_string(rb[i].id) + " and " +
                                            std::to_string(rb[i + 1].id) + " overlap");
    if (std::all_of(o0.begin(), o0.end(), [&](int o) { return o == o0[0]; }))
        throw ValidationError("A2", "all robots share one orientation");
    SimState s;
    s.length = fleet.length;
    for (std::size_t i = 0; i < n; ++i) s.robots.push_back({rb[i], p0[i], o0[i], 1});
    s.boundaries.assign(n, std::nullopt);
    s.boundaries[n - 1] = fleet.length;
    return s;
}

// New shared boundary after a meeting, given the outer boundaries of the pair.
using BoundaryRule = std::function<double(double y_left, double y_right, const RobotParams& a, const RobotParams& b)>;

inline double meeting_boundary(double y_left, double y_right, const RobotParams& a, const RobotParams& b) {
    return (b.v * (y_left + 2.0 * a.r) + a.v * (y_right - 2.0 * b.r)) / (a.v + b.v);
}

inline void apply_discovery(SimState& s, std::size_t b) {
    auto& l = s.robots[b];
    auto& r = s.robots[b + 1];
    const double y = l.p + l.params.r;
    s.boundaries[b] = y;
    r.p = y + r.params.r;
    l.o = -1;
    r.o = 1;
}

// The catcher stops at the new boundary; the caught robot keeps its state.
inline void apply_catch(SimState& s, std::size_t b, std::size_t catcher) {
    auto& l = s.robots[b];
    auto& r = s.robots[b + 1];
    const double y = catcher == b ? l.p + l.params.r : r.p - r.params.r;
    s.boundaries[b] = y;
    l.p = y - l.params.r;
    r.p = y + r.params.r;
    s.robots[catcher].a = 0;
}

inline void apply_arrival(SimState& s, std::size_t i, std::size_t b) {
    auto& rob = s.robots[i];
    const int side = b == i ? 0 : 1;
    const double y = *s.boundary_value(b, side);
    rob.p = side == 0 ? y - rob.params.r : y + rob.params.r;
    rob.a = 0;
}

inline void apply_meeting(SimState& s, std::size_t b, const BoundaryRule& rule = meeting_boundary) {
    const std::size_t i = b, j = (b + 1) % s.n();
    auto& ri = s.robots[i];
    auto& rj = s.robots[j];
    ri.p = *s.boundary_value(b, 0) - ri.params.r;
    rj.p = *s.boundary_value(b, 1) + rj.params.r;
    if (b != s.seam()) {
        auto yl = s.left_boundary(i);
        auto yr = s.right_boundary(j);
        if (yl && yr) s.boundaries[b] = rule(*yl, *yr, ri.params, rj.params);
    }
    ri.o = -1;
    rj.o = 1;
    ri.a = 1;
    rj.a = 1;
}

namespace detail {

struct Candidate {
    double time = 0.0;
    bool contact = false;
    std::size_t robot = 0;
    std::size_t boundary = 0;
    int side = 0;
};

inline double velocity(const RobotState& r) { return r.a * r.o * r.params.v; }

inline std::optional<Candidate> earliest(const SimState& s, double tie_eps) {
    const std::size_t n = s.n();
    std::vector<Candidate> cs;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = s.robots[i];
        if (r.a == 0) continue;
        if (r.o == 1) {
            if (auto y = s.right_boundary(i)) {
                const double d = *y - r.params.r - r.p;
                cs.push_back({s.time + std::max(d, 0.0) / r.params.v, false, i, i, 0});
            }
        } else if (auto y = s.left_boundary(i)) {
            const double d = r.p - r.params.r - *y;
            cs.push_back({s.time + std::max(d, 0.0) / r.params.v, false, i, i == 0 ? n - 1 : i - 1, 1});
        }
    }
    for (std::size_t b = 0; b + 1 < n; ++b) {
        if (s.boundaries[b]) continue;
        const auto& l = s.robots[b];
        const auto& r = s.robots[b + 1];
        const double closing = velocity(l) - velocity(r);
        if (!(closing > 0.0)) continue;
        const double gap = (r.p - r.params.r) - (l.p + l.params.r);
        cs.push_back({s.time + std::max(gap, 0.0) / closing, true, b, b, 0});
    }
    if (cs.empty()) return std::nullopt;
    double tm = cs.front().time;
    for (const auto& c : cs) tm = std::min(tm, c.time);
    std::optional<Candidate> best;
    for (const auto& c : cs) {
        if (c.time > tm + tie_eps) continue;
        if (!best || c.boundary < best->boundary || (c.boundary == best->boundary && c.side < best->side)) best = c;
    }
    best->time = tm;
    return best;
}

inline Event resolve(const SimState& s, const Candidate& c) {
    Event ev;
    ev.time = c.time;
    ev.boundary = c.boundary;
    const std::size_t n = s.n();
    const std::size_t left = c.boundary, right = (c.boundary + 1) % n;
    if (c.contact) {
        const auto& l = s.robots[left];
        const auto& r = s.robots[right];
        if (l.o == 1 && r.o == -1) {
            ev.kind = EventKind::discovery;
            ev.robot_a = left;
            ev.robot_b = right;
        } else {
            ev.kind = EventKind::catch_up;
            ev.robot_a = l.o == 1 ? left : right;
            ev.robot_b = l.o == 1 ? right : left;
        }
        return ev;
    }
    const std::size_t partner = c.side == 0 ? right : left;
    const auto& q = s.robots[partner];
    const bool waiting = q.a == 0 && q.o == (c.side == 0 ? -1 : 1);
    if (waiting) {
        ev.kind = EventKind::meeting;
        ev.robot_a = left;
        ev.robot_b = right;
    } else {
        ev.kind = EventKind::arrival;
        ev.robot_a = c.robot;
    }
    return ev;
}

}  // namespace detail

inline std::optional<Event> peek_event(const SimState& s, double tie_eps = 1e-9) {
    auto c = detail::earliest(s, tie_eps);
    if (!c) return std::nullopt;
    return detail::resolve(s, *c);
}

inline Event next_event(const SimState& s, double tie_eps = 1e-9) {
    auto ev = peek_event(s, tie_eps);
    if (!ev) throw DeadlockError("no future event at t = " + std::to_string(s.time));
    return *ev;
}

// Moves every active robot along its orientation up to time t.
inline void advance(SimState& s, double t) {
    const double dt = t - s.time;
    if (dt > 0.0)
        for (auto& r : s.robots) r.p += detail::velocity(r) * dt;
    s.time = std::max(s.time, t);
}

inline void apply_event(SimState& s, const Event& ev, const BoundaryRule& rule = meeting_boundary) {
    switch (ev.kind) {
        case EventKind::discovery: apply_discovery(s, ev.boundary); break;
        case EventKind::catch_up: apply_catch(s, ev.boundary, ev.robot_a); break;
        case EventKind::arrival: apply_arrival(s, ev.robot_a, ev.boundary); break;
        case EventKind::meeting: apply_meeting(s, ev.boundary, rule); break;
    }
}

// Swaps robot parameters in place. A stopped robot is re-pinned to the
// contact point of the boundary it waits at.
inline bool apply_parameter_change(SimState& s, std::size_t i, std::optional<double> v, std::optional<double> r) {
    if (i >= s.n()) throw ValidationError("input", "parameter change for unknown robot");
    RobotParams np = s.robots[i].params;
    if (v) np.v = *v;
    if (r) np.r = *r;
    validate_params(np);
    FleetConfig f = s.fleet();
    f.robots[i] = np;
    validate_fleet(f);
    auto& rob = s.robots[i];
    const bool changed = np.v != rob.params.v || np.r != rob.params.r;
    rob.params = np;
    if (changed && rob.a == 0) {
        if (rob.o == 1) {
            if (auto y = s.right_boundary(i)) rob.p = *y - np.r;
        } else if (auto y = s.left_boundary(i)) {
            rob.p = *y + np.r;
        }
    }
    return changed;
}

}  // namespace cyclepatrol
