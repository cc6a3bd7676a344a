#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "cyclepatrol/errors.hpp"

namespace cyclepatrol {

struct RobotParams {
    int id = 0;
    double v = 1.0;  // m/s
    double r = 0.0;  // m
};

// Robots are listed in cycle order.
struct FleetConfig {
    double length = 0.0;
    std::vector<RobotParams> robots;

    std::size_t size() const { return robots.size(); }
};

struct GoalPartition {
    double t_star = 0.0;
    std::vector<double> d_star;
    std::vector<double> y_star;
};

inline void validate_params(const RobotParams& p) {
    if (!(p.v > 0.0) || !std::isfinite(p.v))
        throw ValidationError("input", "robot " + std::to_string(p.id) + ": speed must be positive");
    if (!(p.r >= 0.0) || !std::isfinite(p.r))
        throw ValidationError("input", "robot " + std::to_string(p.id) + ": radius must be non-negative");
}

inline double total_radius(const FleetConfig& cfg) {
    double s = 0.0;
    for (const auto& p : cfg.robots) s += p.r;
    return s;
}

inline double total_speed(const FleetConfig& cfg) {
    double s = 0.0;
    for (const auto& p : cfg.robots) s += p.v;
    return s;
}

inline void validate_fleet(const FleetConfig& cfg) {
    if (cfg.robots.size() < 2) throw ValidationError("input", "fleet needs at least two robots");
    if (!(cfg.length > 0.0) || !std::isfinite(cfg.length))
        throw ValidationError("input", "cycle length must be positive");
    for (const auto& p : cfg.robots) validate_params(p);
    const double free = cfg.length - 2.0 * total_radius(cfg);
    if (!(free > 0.0))
        throw StaticCoverageError("L - 2*sum(r) = " + std::to_string(free));
}

// Common traversing time (L - 2 sum r) / sum v.
inline double compute_t_star(const FleetConfig& cfg) {
    validate_fleet(cfg);
    return (cfg.length - 2.0 * total_radius(cfg)) / total_speed(cfg);
}

inline GoalPartition compute_goal_partition(const FleetConfig& cfg) {
    GoalPartition g;
    g.t_star = compute_t_star(cfg);
    const std::size_t n = cfg.size();
    g.d_star.resize(n);
    g.y_star.resize(n);
    double y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = cfg.robots[i];
        g.d_star[i] = p.v * g.t_star + 2.0 * p.r;
        y += g.d_star[i];
        g.y_star[i] = y;
    }
    // The last boundary is the seam; absorb rounding there.
    g.y_star[n - 1] = cfg.length;
    return g;
}

// (d - 2r) / v. Negative when the region is narrower than the zone.
inline double traversing_time(double d, const RobotParams& robot) {
    return (d - 2.0 * robot.r) / robot.v;
}

inline double traversing_time(double d, double v, double r) {
    return (d - 2.0 * r) / v;
}

}  // namespace cyclepatrol
