#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cyclepatrol/fleet.hpp"
#include "cyclepatrol/simulator.hpp"

namespace cyclepatrol {

struct IntervalSample {
    double time = 0.0;  // timestamp of the later meeting
    double value = 0.0;
};

using Series = std::vector<IntervalSample>;

// Successive differences of meeting timestamps, one series per boundary.
inline std::vector<Series> inter_meeting_times(const Trace& tr) {
    const std::size_t n = tr.initial_fleet.size();
    std::vector<Series> out(n);
    std::vector<std::optional<double>> last(n);
    for (const auto& en : tr.entries) {
        if (en.event.kind != EventKind::meeting) continue;
        const std::size_t b = en.event.boundary;
        if (last[b]) out[b].push_back({en.event.time, en.event.time - *last[b]});
        last[b] = en.event.time;
    }
    return out;
}

// Sliding mean over n_bal consecutive samples, stamped with the last one.
inline Series windowed_revisit(const Series& s, std::size_t n_bal) {
    if (n_bal == 0) throw ValidationError("input", "window must hold at least one meeting");
    Series out;
    if (s.size() < n_bal) return out;
    double acc = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        acc += s[k].value;
        if (k >= n_bal) acc -= s[k - n_bal].value;
        if (k + 1 >= n_bal) out.push_back({s[k].time, acc / static_cast<double>(n_bal)});
    }
    return out;
}

inline std::vector<double> windowed_revisit(const std::vector<double>& s, std::size_t n_bal) {
    Series in;
    for (double v : s) in.push_back({0.0, v});
    std::vector<double> out;
    for (const auto& x : windowed_revisit(in, n_bal)) out.push_back(x.value);
    return out;
}

// Times between consecutive forward passes over cycle position x. Motion is
// piecewise linear between trace entries.
inline std::vector<double> point_revisit_times(const Trace& tr, double x) {
    std::vector<double> passes;
    const auto& fleet = tr.initial_fleet;
    auto params_at = [&](std::size_t entry) {
        FleetConfig f = fleet;
        for (const auto& c : tr.changes)
            if (c.entry_index <= entry) f.robots[c.robot] = c.params;
        return f;
    };
    FleetConfig f = fleet;
    std::size_t next_change = 0;
    for (std::size_t k = 0; k + 1 < tr.entries.size(); ++k) {
        while (next_change < tr.changes.size() && tr.changes[next_change].entry_index <= k + 1) {
            f = params_at(k + 1);
            ++next_change;
        }
        const auto& a = tr.entries[k];
        const double t0 = a.event.time, t1 = tr.entries[k + 1].event.time;
        for (std::size_t i = 0; i < a.robots.size(); ++i) {
            const auto& r = a.robots[i];
            if (r.a == 0 || r.o != 1) continue;
            const double p1 = r.p + f.robots[i].v * (t1 - t0);
            if (r.p < x && x <= p1) passes.push_back(t0 + (x - r.p) / f.robots[i].v);
        }
    }
    std::sort(passes.begin(), passes.end());
    std::vector<double> out;
    for (std::size_t k = 1; k < passes.size(); ++k) out.push_back(passes[k] - passes[k - 1]);
    return out;
}

// Largest spread of meeting timestamps inside windows [t0 + k t*, t0 + (k+1) t*).
inline double meeting_spread(const Trace& tr, double t0, double t_star, std::size_t k_from, std::size_t k_to) {
    double worst = 0.0;
    std::vector<std::pair<double, double>> win(k_to - k_from, {INFINITY, -INFINITY});
    for (const auto& en : tr.entries) {
        if (en.event.kind != EventKind::meeting) continue;
        const double rel = (en.event.time - t0) / t_star;
        if (rel < static_cast<double>(k_from) || rel >= static_cast<double>(k_to)) continue;
        auto& w = win[static_cast<std::size_t>(rel) - k_from];
        w.first = std::min(w.first, en.event.time);
        w.second = std::max(w.second, en.event.time);
    }
    for (const auto& w : win)
        if (w.second >= w.first) worst = std::max(worst, w.second - w.first);
    return worst;
}

enum class Verdict { pass, fail, inconclusive, not_applicable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::inconclusive: return "INCONCLUSIVE";
        case Verdict::not_applicable: return "N/A";
    }
    return "?";
}

struct TheoremCheck {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    double predicted = 0.0;
    double measured = 0.0;
    double max_relative_error = 0.0;
    std::size_t samples = 0;
};

struct PerformanceReport {
    double t_star = 0.0;
    std::size_t n = 0;
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    std::size_t n_bal = 0;
    bool balanced = false;
    double convergence_threshold = 1e-3;
    double tolerance = 0.01;
    std::optional<double> convergence_time;
    std::optional<double> steady_start;
    std::vector<double> final_e;
    std::vector<Series> f;
    std::vector<Series> windowed;
    std::vector<TheoremCheck> theorems;
};

struct VerdictOptions {
    double tolerance = 0.01;
    // Rounds allowed after convergence for interlacing and synchronisation.
    double settle_rounds_per_robot = 1.0;
};

inline PerformanceReport theorem_verdicts(const Trace& tr, const VerdictOptions& opt = {}) {
    PerformanceReport rep;
    const FleetConfig fleet = tr.final_fleet();
    rep.n = fleet.size();
    rep.t_star = compute_t_star(fleet);
    rep.tolerance = opt.tolerance;
    rep.convergence_threshold = tr.convergence_threshold;
    for (const auto& r : tr.initial_robots) (r.o == 1 ? rep.n_plus : rep.n_minus)++;
    rep.n_bal = std::min(rep.n_plus, rep.n_minus);
    rep.balanced = rep.n_plus == rep.n_minus;
    rep.convergence_time = tr.convergence_time;
    rep.f = inter_meeting_times(tr);
    for (const auto& s : rep.f) rep.windowed.push_back(windowed_revisit(s, std::max<std::size_t>(rep.n_bal, 1)));
    if (!tr.entries.empty()) rep.final_e = tr.entries.back().e;

    std::size_t meetings = 0;
    for (const auto& en : tr.entries) meetings += en.event.kind == EventKind::meeting;
    const bool long_enough = meetings >= 50 * rep.n;
    const bool converged = rep.convergence_time.has_value() && long_enough;
    if (converged)
        rep.steady_start = *rep.convergence_time + opt.settle_rounds_per_robot * static_cast<double>(rep.n) * rep.t_star;

    TheoremCheck t1{"traversing-time convergence", Verdict::inconclusive, rep.t_star, 0.0, 0.0, rep.n};
    if (!rep.final_e.empty()) {
        t1.max_relative_error = max_relative_deviation(rep.final_e, rep.t_star);
        double acc = 0.0;
        for (double e : rep.final_e) acc += e;
        t1.measured = acc / static_cast<double>(rep.final_e.size());
    }
    if (converged) t1.verdict = t1.max_relative_error < opt.tolerance ? Verdict::pass : Verdict::fail;

    auto steady_check = [&](std::string name, double predicted, const std::vector<Series>& series) {
        TheoremCheck c{std::move(name), Verdict::inconclusive, predicted, 0.0, 0.0, 0};
        if (!converged) return c;
        double acc = 0.0;
        for (const auto& s : series)
            for (const auto& x : s) {
                if (x.time - x.value < *rep.steady_start) continue;
                ++c.samples;
                acc += x.value;
                c.max_relative_error = std::max(c.max_relative_error, std::abs(x.value - predicted) / predicted);
            }
        if (c.samples == 0) return c;
        c.measured = acc / static_cast<double>(c.samples);
        c.verdict = c.max_relative_error < opt.tolerance ? Verdict::pass : Verdict::fail;
        return c;
    };
    TheoremCheck t2{"balanced revisiting time", Verdict::not_applicable, 2.0 * rep.t_star, 0.0, 0.0, 0};
    TheoremCheck t3{"unbalanced averaged revisiting time", Verdict::not_applicable, 0.0, 0.0, 0.0, 0};
    if (rep.n_bal > 0) {
        if (rep.balanced) t2 = steady_check(t2.name, t2.predicted, rep.f);
        else
            t3 = steady_check(t3.name, static_cast<double>(rep.n) * rep.t_star / static_cast<double>(rep.n_bal),
                              rep.windowed);
    }
    rep.theorems = {t1, t2, t3};
    return rep;
}

// Measured revisiting time for the fleet's orientation class.
inline std::optional<double> measured_revisit(const PerformanceReport& rep) {
    const auto& c = rep.balanced ? rep.theorems[1] : rep.theorems[2];
    if (c.samples == 0) return std::nullopt;
    return c.measured;
}

inline bool any_failure(const PerformanceReport& rep) {
    return std::any_of(rep.theorems.begin(), rep.theorems.end(),
                       [](const TheoremCheck& c) { return c.verdict == Verdict::fail; });
}

}  // namespace cyclepatrol
