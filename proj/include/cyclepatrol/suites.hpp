#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cyclepatrol/consensus.hpp"
#include "cyclepatrol/engine.hpp"
#include "cyclepatrol/parallel.hpp"
#include "cyclepatrol/random.hpp"
#include "cyclepatrol/rounds.hpp"
#include "cyclepatrol/simulator.hpp"
#include "cyclepatrol/time_form.hpp"
#include "cyclepatrol/word_checks.hpp"
#include "cyclepatrol/words.hpp"

namespace cyclepatrol {

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t checks = 0;
    std::size_t violations = 0;
    std::vector<std::string> details;  // first few violations
    double seconds = 0.0;

    bool ok() const { return violations == 0 && cases > 0; }

    void fail(const std::string& what) {
        ++violations;
        if (details.size() < 20) details.push_back(what);
    }
    void merge(const SuiteResult& o) {
        cases += o.cases;
        checks += o.checks;
        violations += o.violations;
        for (const auto& d : o.details)
            if (details.size() < 20) details.push_back(d);
    }
};

struct SuiteOptions {
    std::uint64_t seed = 1;
    BoundaryRule boundary_rule = meeting_boundary;
    std::size_t consensus_fleets = 200;
    std::size_t crosscheck_runs = 20;
    std::size_t words_max_n = 12;
    std::size_t words_random = 10000;
    std::size_t words_random_n = 64;
    std::size_t lemma_random = 1000;
    std::size_t rounds_instances = 20;
    std::size_t rounds_window = 100;
    double rounds_tolerance = 1e-6;
    std::size_t conservation_events = 100000;
    std::size_t time_form_events = 1000;
};

// Random fleet on L = 1000 whose zones cover at most 40% of the cycle.
inline FleetConfig random_fleet(Rng& rng, std::size_t n_lo, std::size_t n_hi, double v_lo = 0.1, double v_hi = 2.0) {
    FleetConfig f;
    f.length = 1000.0;
    const std::size_t n = n_lo + rng.below(n_hi - n_lo + 1);
    for (std::size_t i = 0; i < n; ++i)
        f.robots.push_back({static_cast<int>(i + 1), rng.uniform(v_lo, v_hi),
                            rng.uniform(0.0, 0.4 * f.length / (2.0 * static_cast<double>(n)))});
    return f;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + k + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace detail {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

}  // namespace detail

// Matrix oracle: spectra, round-robin fixed point, weighted-sum conservation,
// and the engine's traversing times against products of P_i.
inline SuiteResult run_consensus_suite(const SuiteOptions& opt = {}) {
    detail::Stopwatch sw;
    SuiteResult res;
    res.name = "consensus";
    std::vector<SuiteResult> parts(opt.consensus_fleets + opt.crosscheck_runs);
    parallel_for(parts.size(), [&](std::size_t k) {
        SuiteResult& r = parts[k];
        r.cases = 1;
        Rng rng(mix_seed(opt.seed, 1000 + k));
        if (k < opt.consensus_fleets) {
            const std::size_t n = 2 + rng.below(31);
            std::vector<double> v(n);
            for (auto& x : v) x = 10.0 * (1.0 - rng.uniform());  // (0, 10]
            auto m = build_matrices(v);
            auto spec = check_spectrum(m);
            ++r.checks;
            if (!spec.ok) r.fail("fleet " + std::to_string(k) + ": " + spec.diagnostic);
            // Each P_i is a projection: spectrum {0, 1, ..., 1}.
            for (const auto& ls : spec.links) {
                ++r.checks;
                if (std::abs(ls.eigenvalues.front()) > 1e-9 || std::abs(ls.eigenvalues.back() - 1.0) > 1e-9 ||
                    std::abs(ls.eigenvalues[1] - 1.0) > 1e-9)
                    r.fail("fleet " + std::to_string(k) + ": link spectrum differs from {0, 1}");
            }
            Eigen::VectorXd e0(static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < e0.size(); ++i) e0(i) = rng.uniform(-100.0, 400.0);
            const double ws = m.speeds.dot(e0);
            for (std::size_t i = 0; i < m.links(); ++i) {
                ++r.checks;
                const double after = m.speeds.dot(m.P[i] * e0);
                if (std::abs(after - ws) > 1e-9 * std::max(1.0, std::abs(ws)))
                    r.fail("fleet " + std::to_string(k) + ": weighted sum not conserved by link " + std::to_string(i + 1));
            }
            auto run = iterate_round_robin(m, e0, 1e-9, 10000);
            ++r.checks;
            if (!run.converged)
                r.fail("fleet " + std::to_string(k) + ": round robin error " + std::to_string(run.error) + " after " +
                       std::to_string(run.sweeps) + " sweeps, v_min/v_max " +
                       std::to_string(m.speeds.minCoeff() / m.speeds.maxCoeff()));
            return;
        }
        // Engine cross-check.
        FleetConfig f = random_fleet(rng, 2, 8);
        auto p0 = random_positions(f, rng);
        auto o0 = random_orientations(f.size(), rng);
        SimOptions so;
        so.boundary_rule = opt.boundary_rule;
        so.record_snapshots = false;
        Simulator sim(init(f, p0, o0), so);
        sim.run_events(4000);
        const auto& es = sim.trace().entries;
        std::size_t first = es.size();
        for (std::size_t q = 0; q < es.size(); ++q)
            if (max_relative_deviation(es[q].e, 1.0) < INFINITY) {
                first = q;
                break;
            }
        ++r.checks;
        if (first == es.size()) {
            r.fail("cross-check run " + std::to_string(k) + ": boundaries never all known");
            return;
        }
        std::vector<double> sp;
        for (const auto& p : f.robots) sp.push_back(p.v);
        auto m = build_matrices(sp);
        Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(es[first].e.data(), static_cast<Eigen::Index>(f.size()));
        double worst = 0.0;
        for (std::size_t q = first + 1; q < es.size(); ++q) {
            const auto& ev = es[q].event;
            if (ev.kind == EventKind::meeting && ev.boundary + 1 < f.size())
                e = iterate_consensus(m, e, {ev.boundary});
            for (std::size_t i = 0; i < f.size(); ++i)
                worst = std::max(worst, std::abs(e(static_cast<Eigen::Index>(i)) - es[q].e[i]));
        }
        ++r.checks;
        if (worst > 1e-9)
            r.fail("cross-check run " + std::to_string(k) + ": engine and oracle differ by " + std::to_string(worst));
    });
    for (const auto& p : parts) res.merge(p);
    res.seconds = sw.seconds();
    return res;
}

// Exhaustive lemma checks for n <= words_max_n, the interlacing bound on
// random long words, and lemma checks on random mid-size words.
inline SuiteResult run_words_suite(const SuiteOptions& opt = {}) {
    detail::Stopwatch sw;
    SuiteResult res;
    res.name = "words";
    // Exhaustive: split each n into chunks of words.
    struct Job {
        std::size_t n;
        std::uint64_t lo, hi;
    };
    std::vector<Job> jobs;
    for (std::size_t n = 2; n <= opt.words_max_n; ++n) {
        const std::uint64_t count = std::uint64_t{1} << n;
        const std::uint64_t step = 256;
        for (std::uint64_t lo = 1; lo + 1 < count; lo += step) jobs.push_back({n, lo, std::min(lo + step, count - 1)});
    }
    const std::size_t random_jobs = 64;
    std::vector<SuiteResult> parts(jobs.size() + random_jobs);
    parallel_for(parts.size(), [&](std::size_t k) {
        SuiteResult& r = parts[k];
        auto check = [&](const OrientationWord& w, bool lemmas) {
            ++r.cases;
            if (lemmas) {
                auto rep = check_word_lemmas(w);
                r.checks += 10;
                if (rep.total() > 0) {
                    std::string what = w.str() + ":";
                    for (const auto& [name, count] : rep.as_map())
                        if (count) what += " " + name + "=" + std::to_string(count);
                    r.fail(what);
                }
            }
            auto ev = evolve_until_interlaced(w);
            ++r.checks;
            if (!ev.interlaced || (ev.rounds > 0 && ev.rounds >= w.n_bal()))
                r.fail(w.str() + ": interlaced after " + std::to_string(ev.rounds) + " rounds, n_bal " +
                       std::to_string(w.n_bal()) + (ev.diagnostic.empty() ? "" : " (" + ev.diagnostic + ")"));
        };
        if (k < jobs.size()) {
            const Job& j = jobs[k];
            for (std::uint64_t bits = j.lo; bits < j.hi; ++bits) {
                std::vector<int> letters(j.n);
                for (std::size_t i = 0; i < j.n; ++i) letters[i] = (bits >> i) & 1 ? 1 : -1;
                check(OrientationWord(std::move(letters)), true);
            }
            return;
        }
        const std::size_t slot = k - jobs.size();
        Rng rng(mix_seed(opt.seed, 2000 + slot));
        for (std::size_t q = slot; q < opt.words_random; q += random_jobs) {
            const std::size_t n = opt.words_random_n;
            check(OrientationWord(random_orientations(n, rng)), false);
        }
        for (std::size_t q = slot; q < opt.lemma_random; q += random_jobs) {
            const std::size_t n = opt.words_max_n + 1 + rng.below(opt.words_random_n - opt.words_max_n);
            check(OrientationWord(random_orientations(n, rng)), true);
        }
    });
    for (const auto& p : parts) res.merge(p);
    res.seconds = sw.seconds();
    return res;
}

struct TightRun {
    std::optional<double> converged_at;  // time of the first tightly converged event
    double t_star = 0.0;
};

// Runs until max |e - t*| / t* < tol has held for a full chunk, then
// `extra_rounds` more. Entries before convergence are dropped as it goes.
inline TightRun run_until_tight(Simulator& sim, double tol, double extra_rounds, double max_rounds = 60000.0) {
    TightRun out;
    out.t_star = sim.t_star();
    const double chunk = 50.0 * out.t_star;
    double elapsed = 0.0;
    while (elapsed < max_rounds * out.t_star) {
        const double chunk_start = sim.state().time;
        sim.run_until(chunk_start + chunk);
        elapsed += chunk;
        auto from = converged_from(sim.trace(), out.t_star, tol);
        if (from && sim.trace().entries[*from].event.time <= chunk_start) {
            out.converged_at = sim.trace().entries[*from].event.time;
            sim.run_until(sim.state().time + extra_rounds * out.t_star);
            return out;
        }
        if (!from && sim.trace().entries.size() > 50000) sim.forget_entries();
    }
    return out;
}

// Round model against the engine on converged random fleets.
inline SuiteResult run_rounds_suite(const SuiteOptions& opt = {}) {
    detail::Stopwatch sw;
    SuiteResult res;
    res.name = "rounds";
    std::vector<SuiteResult> parts(opt.rounds_instances);
    parallel_for(parts.size(), [&](std::size_t k) {
        SuiteResult& r = parts[k];
        r.cases = 1;
        const std::string tag = "instance " + std::to_string(k) + ": ";
        Rng rng(mix_seed(opt.seed, 3000 + k));
        FleetConfig f = random_fleet(rng, 2, 10, 0.2, 2.0);
        const std::size_t n = f.size();
        auto p0 = random_positions(f, rng);
        auto o0 = random_orientations(n, rng);
        SimOptions so;
        so.boundary_rule = opt.boundary_rule;
        Simulator sim(init(f, p0, o0), so);
        const std::size_t window = std::max(opt.rounds_window, 12 * n + n);
        const double tight = 1e-12;
        TightRun tr;
        try {
            tr = run_until_tight(sim, tight, static_cast<double>(window) + 4.0);
        } catch (const std::exception& e) {
            r.fail(tag + e.what());
            return;
        }
        ++r.checks;
        if (!tr.converged_at) {
            r.fail(tag + "no tight convergence");
            return;
        }
        RoundState s0;
        try {
            LiftOptions lo;
            lo.after_time = *tr.converged_at;
            s0 = lift_from_trace(sim.trace(), f, tight, lo);
        } catch (const std::exception& e) {
            r.fail(tag + "lift failed: " + e.what());
            return;
        }
        RoundRun run = run_rounds(s0, window);
        auto cmp = compare_with_trace(sim.trace(), run);
        ++r.checks;
        if (!cmp.ok(opt.rounds_tolerance))
            r.fail(tag + "engine/model mismatch: model " + std::to_string(cmp.model_meetings) + " engine " +
                   std::to_string(cmp.engine_meetings) + " unmatched " + std::to_string(cmp.unmatched) + " dt " +
                   std::to_string(cmp.max_time_error) + " dy " + std::to_string(cmp.max_position_error));
        ++r.checks;
        if (run.formulation_mismatches) r.fail(tag + "position and orientation meeting tests disagree");

        // Orientation trajectory against step_word.
        OrientationWord w = s0.word();
        std::optional<std::size_t> k_int;
        for (std::size_t q = 0; q < window; ++q) {
            ++r.checks;
            if (!(run.states[q].word() == w)) {
                r.fail(tag + "round " + std::to_string(q) + " word differs from step_word");
                break;
            }
            const bool il = is_interlaced(w).interlaced;
            if (il && !k_int) k_int = q;
            if (k_int) {
                ++r.checks;
                if (!il) r.fail(tag + "interlacing lost at round " + std::to_string(q));
                if (run.meetings[q].size() != w.n_bal())
                    r.fail(tag + "round " + std::to_string(q) + " has " + std::to_string(run.meetings[q].size()) +
                           " meetings, n_bal " + std::to_string(w.n_bal()));
            }
            w = step_word(w);
        }
        ++r.checks;
        if (!k_int) {
            r.fail(tag + "never interlaced");
            return;
        }
        // Right-boundary arrivals per robot over n-round windows.
        for (std::size_t a = *k_int; a + n <= window && a < *k_int + 10 * n; ++a) {
            std::vector<std::size_t> count(n, 0);
            for (std::size_t q = a; q < a + n; ++q)
                for (const auto& m : run.meetings[q]) ++count[m.left];
            for (std::size_t i = 0; i < n; ++i) {
                ++r.checks;
                if (count[i] != s0.word().n_bal()) {
                    r.fail(tag + "robot " + std::to_string(i + 1) + " met at its right boundary " +
                           std::to_string(count[i]) + " times in rounds " + std::to_string(a) + "..");
                    break;
                }
            }
        }
        if (s0.word().balanced()) {
            auto sync = check_synchronization(run.states, *k_int);
            ++r.checks;
            if (!sync.ok)
                r.fail(tag + "not synchronised: robot " + std::to_string(*sync.robot + 1) + " round " +
                       std::to_string(*sync.round));
        }
    });
    for (const auto& p : parts) res.merge(p);
    res.seconds = sw.seconds();
    return res;
}

// Engine invariants after every event of randomized runs, plus the
// traversing-time engine replaying the patrolling phase.
inline SuiteResult run_conservation_suite(const SuiteOptions& opt = {}) {
    detail::Stopwatch sw;
    SuiteResult res;
    res.name = "conservation";
    const std::size_t per_run = 5000;
    const std::size_t runs = (opt.conservation_events + per_run - 1) / per_run;
    std::vector<SuiteResult> parts(runs);
    parallel_for(runs, [&](std::size_t k) {
        SuiteResult& r = parts[k];
        r.cases = 1;
        const std::string tag = "run " + std::to_string(k) + ": ";
        Rng rng(mix_seed(opt.seed, 4000 + k));
        FleetConfig f = random_fleet(rng, 2, 10);
        const std::size_t n = f.size();
        auto p0 = random_positions(f, rng);
        auto o0 = random_orientations(n, rng);
        SimOptions so;
        so.boundary_rule = opt.boundary_rule;
        so.record_snapshots = false;
        Simulator sim(init(f, p0, o0), so);
        const double L = f.length;
        const double free = L - 2.0 * total_radius(f);
        int osum = 0;
        for (int o : o0) osum += o;
        std::vector<double> last_touch(n, 0.0);
        std::optional<SimState> patrol_start;
        for (std::size_t q = 0; q < per_run; ++q) {
            const SimState before = sim.state();
            Event ev;
            try {
                ev = sim.step();
            } catch (const DeadlockError& e) {
                r.fail(tag + "deadlock: " + e.what());
                return;
            }
            const SimState& s = sim.state();
            r.checks += 7;
            int sum = 0;
            for (const auto& rb : s.robots) sum += rb.o;
            if (sum != osum) r.fail(tag + "orientation sum changed");
            if (!s.boundaries[n - 1] || *s.boundaries[n - 1] != L) r.fail(tag + "seam boundary moved");
            std::optional<double> prev = 0.0;
            for (std::size_t b = 0; b < n; ++b) {
                if (!s.boundaries[b]) continue;
                if (!(*s.boundaries[b] > *prev)) r.fail(tag + "boundaries not strictly ordered");
                prev = s.boundaries[b];
            }
            // Event-level order: only the robots around the boundary take part and
            // a waiting robot sits at the contact point of its own boundary.
            const auto adjacent = [&](std::size_t k) { return k == ev.boundary || k == (ev.boundary + 1) % n; };
            if (!adjacent(ev.robot_a) || (ev.robot_b && !adjacent(*ev.robot_b)))
                r.fail(tag + "event involves a robot away from its boundary");
            for (std::size_t i = 0; i < n; ++i) {
                const auto& rb = s.robots[i];
                auto y = rb.o > 0 ? s.right_boundary(i) : s.left_boundary(i);
                if (rb.a != 0 || !y) continue;
                const double c = rb.o > 0 ? *y - rb.params.r : *y + rb.params.r;
                if (std::abs(rb.p - c) > 1e-9 * L) r.fail(tag + "robot " + std::to_string(i + 1) + " waits off its boundary");
            }
            last_touch[ev.robot_a] = ev.time;
            if (ev.robot_b) last_touch[*ev.robot_b] = ev.time;
            for (std::size_t i = 0; i < n; ++i) {
                if (before.robots[i].a == 0) last_touch[i] = std::max(last_touch[i], before.time);
                if (s.robots[i].a == 1 && ev.time - last_touch[i] > L / s.robots[i].params.v + 1e-9)
                    r.fail(tag + "robot " + std::to_string(i + 1) + " active too long");
            }
            if (ev.kind == EventKind::meeting && ev.boundary + 1 < n) {
                const std::size_t i = ev.boundary, j = i + 1;
                auto ei0 = before.traversing_time(i), ej0 = before.traversing_time(j);
                auto ei = s.traversing_time(i), ej = s.traversing_time(j);
                if (ei0 && ej0 && ei && ej) {
                    const double vi = f.robots[i].v, vj = f.robots[j].v;
                    const double mean = (vi * *ei0 + vj * *ej0) / (vi + vj);
                    const double tol = 1e-9 * std::max(1.0, std::abs(mean));
                    if (std::abs(*ei - mean) > tol || std::abs(*ej - mean) > tol)
                        r.fail(tag + "meeting at boundary " + std::to_string(i + 1) + " did not equalise e");
                }
            }
            if (s.all_known()) {
                double ws = 0.0;
                for (std::size_t i = 0; i < n; ++i) ws += f.robots[i].v * *s.traversing_time(i);
                if (std::abs(ws - free) > 1e-9 * L) r.fail(tag + "weighted traversing-time sum drifted");
                if (!patrol_start) patrol_start = s;
            }
        }
        if (!patrol_start) {
            r.fail(tag + "never finished discovery");
            return;
        }
        // Replay from the first fully discovered state with the time form.
        Simulator replay(*patrol_start, so);
        TimeFormSimulator tf(*patrol_start, TripDuration::at_departure);
        for (std::size_t q = 0; q < opt.time_form_events; ++q) {
            const Event a = replay.step();
            const Event b = tf.step();
            ++r.checks;
            if (a.kind != b.kind || a.boundary != b.boundary || a.robot_a != b.robot_a ||
                std::abs(a.time - b.time) > 1e-9) {
                r.fail(tag + "time form diverges at event " + std::to_string(q) + " (" + to_string(a.kind) + " b" +
                       std::to_string(a.boundary + 1) + " t=" + std::to_string(a.time) + " vs " + to_string(b.kind) +
                       " b" + std::to_string(b.boundary + 1) + " t=" + std::to_string(b.time) + ")");
                break;
            }
        }
    });
    for (const auto& p : parts) res.merge(p);
    res.seconds = sw.seconds();
    return res;
}

}  // namespace cyclepatrol
