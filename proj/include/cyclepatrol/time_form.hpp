#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "cyclepatrol/engine.hpp"

namespace cyclepatrol {

// Which traversing time a robot travels for after a meeting.
enum class TripDuration {
    post_update,   // e(t+), the value produced by the update
    at_departure,  // e(t-), the length of the region it actually crosses
};

// Patrolling-phase engine that tracks traversing times instead of boundaries.
// Robots travel for e_i seconds between boundaries and a meeting applies
// e_i <- e_i + (eps/v_i)(e_j - e_i), e_j <- e_j - (eps/v_j)(e_j - e_i).
class TimeFormSimulator {
public:
    TimeFormSimulator(const SimState& s, TripDuration mode, double tie_eps = 1e-9)
        : mode_(mode), tie_eps_(tie_eps), time_(s.time) {
        if (!s.all_known()) throw ValidationError("input", "time-form engine needs every boundary known");
        for (std::size_t i = 0; i < s.n(); ++i) {
            const auto& r = s.robots[i];
            Robot t;
            t.v = r.params.v;
            t.e = *s.traversing_time(i);
            t.o = r.o;
            t.a = r.a;
            if (r.a == 1) {
                const double d = r.o == 1 ? *s.right_boundary(i) - r.params.r - r.p
                                          : r.p - r.params.r - *s.left_boundary(i);
                t.arrival = time_ + std::max(d, 0.0) / r.params.v;
            }
            robots_.push_back(t);
        }
    }

    double time() const { return time_; }
    std::vector<double> e_vector() const {
        std::vector<double> e;
        for (const auto& r : robots_) e.push_back(r.e);
        return e;
    }

    Event step() {
        const std::size_t n = robots_.size();
        double tm = std::numeric_limits<double>::infinity();
        for (const auto& r : robots_)
            if (r.a == 1) tm = std::min(tm, r.arrival);
        if (!std::isfinite(tm)) throw DeadlockError("time-form engine has no pending arrival");
        std::optional<std::size_t> pick;
        std::size_t pick_b = 0;
        int pick_side = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = robots_[i];
            if (r.a == 0 || r.arrival > tm + tie_eps_) continue;
            const std::size_t b = r.o == 1 ? i : (i == 0 ? n - 1 : i - 1);
            const int side = r.o == 1 ? 0 : 1;
            if (!pick || b < pick_b || (b == pick_b && side < pick_side)) {
                pick = i;
                pick_b = b;
                pick_side = side;
            }
        }
        time_ = tm;
        const std::size_t left = pick_b, right = (pick_b + 1) % n;
        const std::size_t partner = pick_side == 0 ? right : left;
        const auto& q = robots_[partner];
        Event ev;
        ev.time = tm;
        ev.boundary = pick_b;
        if (q.a == 0 && q.o == (pick_side == 0 ? -1 : 1)) {
            ev.kind = EventKind::meeting;
            ev.robot_a = left;
            ev.robot_b = right;
            meet(left, right, pick_b != n - 1);
        } else {
            ev.kind = EventKind::arrival;
            ev.robot_a = *pick;
            robots_[*pick].a = 0;
        }
        return ev;
    }

private:
    struct Robot {
        double v = 1.0;
        double e = 0.0;
        int o = 1;
        int a = 1;
        double arrival = 0.0;
    };

    void meet(std::size_t i, std::size_t j, bool update) {
        auto& ri = robots_[i];
        auto& rj = robots_[j];
        const double ei = ri.e, ej = rj.e;
        if (update) {
            const double eps = ri.v * rj.v / (ri.v + rj.v);
            ri.e = ei + eps / ri.v * (ej - ei);
            rj.e = ej - eps / rj.v * (ej - ei);
        }
        const bool post = mode_ == TripDuration::post_update;
        ri.arrival = time_ + std::max(post ? ri.e : ei, 0.0);
        rj.arrival = time_ + std::max(post ? rj.e : ej, 0.0);
        ri.o = -1;
        rj.o = 1;
        ri.a = 1;
        rj.a = 1;
    }

    TripDuration mode_;
    double tie_eps_;
    double time_;
    std::vector<Robot> robots_;
};

}  // namespace cyclepatrol
