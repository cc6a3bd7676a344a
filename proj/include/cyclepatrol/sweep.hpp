#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cyclepatrol/metrics.hpp"
#include "cyclepatrol/parallel.hpp"
#include "cyclepatrol/random.hpp"
#include "cyclepatrol/simulator.hpp"
#include "cyclepatrol/suites.hpp"

namespace cyclepatrol {

struct SweepRow {
    std::string sweep;
    std::size_t n = 0;
    double factor = 1.0;
    double t_star = 0.0;
    double predicted = 0.0;
    std::optional<double> measured;

    std::optional<double> relative_error() const {
        if (!measured) return std::nullopt;
        return std::abs(*measured - predicted) / predicted;
    }
};

inline double predicted_revisit(const FleetConfig& f, std::size_t n_plus) {
    const std::size_t n = f.size();
    const std::size_t n_bal = std::min(n_plus, n - n_plus);
    return static_cast<double>(n) * compute_t_star(f) / static_cast<double>(n_bal);
}

// Simulates from the given start until the verdict window holds enough
// steady-state meetings, and returns the measured revisiting time.
inline std::optional<double> simulate_revisit(const FleetConfig& f, const std::vector<double>& p0,
                                              const std::vector<int>& o0, double max_rounds = 40000.0) {
    SimOptions so;
    so.record_snapshots = false;
    Simulator sim(init(f, p0, o0), so);
    const double ts = sim.t_star();
    const double n = static_cast<double>(f.size());
    const double chunk = 20.0 * ts;
    while (sim.state().time < max_rounds * ts) {
        sim.run_until(sim.state().time + chunk);
        const auto& tr = sim.trace();
        if (!tr.convergence_time) {
            if (tr.entries.size() > 50000) sim.forget_entries();
            continue;
        }
        if (sim.state().time < *tr.convergence_time + (5.0 * n + 50.0) * ts) continue;
        auto rep = theorem_verdicts(tr);
        if (auto m = measured_revisit(rep)) return m;
    }
    return std::nullopt;
}

struct SweepOptions {
    std::uint64_t seed = 1;
    double length = 10000.0;
    double v = 2.0;
    double r = 50.0;
};

// n robots with n_plus = ceil(n/2), so n_bal = floor(n/2).
inline std::vector<SweepRow> sweep_robot_count(std::size_t n_lo, std::size_t n_hi, const SweepOptions& opt = {}) {
    std::vector<SweepRow> rows(n_hi - n_lo + 1);
    parallel_for(rows.size(), [&](std::size_t k) {
        const std::size_t n = n_lo + k;
        FleetConfig f;
        f.length = opt.length;
        for (std::size_t i = 0; i < n; ++i) f.robots.push_back({static_cast<int>(i + 1), opt.v, opt.r});
        Rng rng(mix_seed(opt.seed, 5000 + n));
        auto p0 = random_positions(f, rng);
        auto o0 = random_orientations(n, (n + 1) / 2, rng);
        SweepRow& row = rows[k];
        row.sweep = "n";
        row.n = n;
        row.t_star = compute_t_star(f);
        row.predicted = predicted_revisit(f, (n + 1) / 2);
        row.measured = simulate_revisit(f, p0, o0);
    });
    return rows;
}

enum class FactorTarget { radius, speed, both };

inline const char* to_string(FactorTarget t) {
    switch (t) {
        case FactorTarget::radius: return "radius";
        case FactorTarget::speed: return "speed";
        case FactorTarget::both: return "both";
    }
    return "?";
}

// Six robots, balanced; robots 1 and 2 get their radius and/or speed scaled.
inline std::vector<SweepRow> sweep_factor(const std::vector<double>& factors, FactorTarget target,
                                          const SweepOptions& opt = {}) {
    std::vector<SweepRow> rows(factors.size());
    parallel_for(rows.size(), [&](std::size_t k) {
        const double c = factors[k];
        FleetConfig f;
        f.length = opt.length;
        for (std::size_t i = 0; i < 6; ++i) {
            RobotParams p{static_cast<int>(i + 1), opt.v, opt.r};
            if (i < 2) {
                if (target != FactorTarget::speed) p.r *= c;
                if (target != FactorTarget::radius) p.v *= c;
            }
            f.robots.push_back(p);
        }
        Rng rng(mix_seed(opt.seed, 6000 + k));
        auto p0 = random_positions(f, rng);
        auto o0 = random_orientations(6, 3, rng);
        SweepRow& row = rows[k];
        row.sweep = std::string("factor-") + to_string(target);
        row.n = 6;
        row.factor = c;
        row.t_star = compute_t_star(f);
        row.predicted = predicted_revisit(f, 3);
        row.measured = simulate_revisit(f, p0, o0);
    });
    return rows;
}

}  // namespace cyclepatrol
