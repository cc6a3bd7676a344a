#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cyclepatrol/cyclepatrol.hpp"

namespace cp = cyclepatrol;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, usage = 1, validation = 2, suite_failure = 3 };

cp::BoundaryRule boundary_rule() {
#ifdef CYCLE_PATROL_MUTANT
    return [](double yl, double yr, const cp::RobotParams& a, const cp::RobotParams& b) {
        return (b.v * (yl - 2.0 * a.r) + a.v * (yr + 2.0 * b.r)) / (a.v + b.v);
    };
#else
    return cp::meeting_boundary;
#endif
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cp::ValidationError("input", "cannot write " + path.string());
    out << text;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") std::cout << text;
    else write_file(out_path, text);
}

int cmd_tour(const std::string& tasks_path, const std::string& method, const std::string& out_path) {
    auto ts = cp::parse_tasks(cp::load_json(tasks_path));
    auto g = method == "nn" ? cp::build_tour_nn(ts) : cp::build_tour_mst(ts);
    if (g.total_length == 0.0) std::cerr << "warning: cycle has zero length (single task location)\n";
    emit(out_path, cp::to_json(g).dump(2) + "\n");
    return ok;
}

struct SimulateArgs {
    std::string fleet_path;
    std::optional<double> until;
    std::optional<std::size_t> events;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

int cmd_simulate(const SimulateArgs& a) {
    auto sc = cp::parse_scenario(cp::load_json(a.fleet_path));
    cp::Rng rng(a.seed);
    const std::vector<double> p0 = sc.p0 ? *sc.p0 : cp::random_positions(sc.fleet, rng);
    const std::vector<int> o0 = sc.o0 ? *sc.o0 : cp::random_orientations(sc.fleet.size(), rng);
    cp::SimOptions so;
    so.boundary_rule = boundary_rule();
    cp::Simulator sim(cp::init(sc.fleet, p0, o0), so);
    for (const auto& c : sc.events) sim.schedule(c);
    if (a.events) sim.run_events(*a.events);
    else sim.run_until(a.until.value_or(1e6));

    const auto& tr = sim.trace();
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    std::ostringstream csv;
    cp::write_trace_csv(csv, tr);
    write_file(dir / "trace.csv", csv.str());
    auto rep = cp::theorem_verdicts(tr);
    write_file(dir / "report.json", cp::to_json(rep).dump(2) + "\n");
    std::ostringstream plot;
    cp::write_plot_csv(plot, tr, rep);
    write_file(dir / "plot.csv", plot.str());

    // Round model on the converged tail, when there is one.
    if (tr.convergence_time) {
        try {
            auto s0 = cp::lift_from_trace(tr, tr.final_fleet(), tr.convergence_threshold);
            auto run = cp::run_rounds(s0, 4 * sc.fleet.size());
            std::ostringstream rounds;
            cp::write_rounds_csv(rounds, run.rows);
            write_file(dir / "rounds.csv", rounds.str());
            auto ev = cp::evolve_until_interlaced(s0.word());
            std::ostringstream words;
            cp::write_history_csv(words, ev.history);
            write_file(dir / "words.csv", words.str());
        } catch (const cp::ValidationError& e) {
            std::cerr << "note: round model skipped: " << e.what() << "\n";
        }
    }

    std::cout << "t_star " << cp::fmt9(rep.t_star) << "\n";
    for (const auto& c : rep.theorems)
        std::cout << c.name << ": " << cp::to_string(c.verdict) << " (measured " << cp::fmt9(c.measured)
                  << ", predicted " << cp::fmt9(c.predicted) << ")\n";
    return cp::any_failure(rep) ? suite_failure : ok;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path) {
    cp::SuiteOptions opt;
    opt.seed = seed;
    opt.boundary_rule = boundary_rule();
    std::vector<cp::SuiteResult> results;
    if (suite == "consensus" || suite == "all") results.push_back(cp::run_consensus_suite(opt));
    if (suite == "words" || suite == "all") results.push_back(cp::run_words_suite(opt));
    if (suite == "rounds" || suite == "all") results.push_back(cp::run_rounds_suite(opt));
    if (suite == "conservation" || suite == "all") results.push_back(cp::run_conservation_suite(opt));
    bool all_ok = true;
    cp::json j = cp::json::array();
    for (const auto& r : results) {
        all_ok = all_ok && r.ok();
        std::cout << (r.ok() ? "PASS " : "FAIL ") << r.name << ": " << r.cases << " cases, " << r.checks
                  << " checks, " << r.violations << " violations\n";
        for (const auto& d : r.details) std::cout << "  " << d << "\n";
        j.push_back({{"suite", r.name},
                     {"ok", r.ok()},
                     {"cases", r.cases},
                     {"checks", r.checks},
                     {"violations", r.violations},
                     {"details", r.details}});
    }
    if (suite == "consensus" || suite == "all") {
        // Spectral report of the first consensus sample, for inspection.
        cp::Rng rng(cp::mix_seed(seed, 1000));
        std::vector<double> v(2 + rng.below(31));
        for (auto& x : v) x = 10.0 * (1.0 - rng.uniform());
        auto m = cp::build_matrices(v);
        Eigen::VectorXd e0 = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(v.size()), 0.0, 100.0);
        auto run = cp::iterate_round_robin(m, e0);
        if (!out_path.empty()) {
            cp::json doc{{"suites", j}, {"spectrum_sample", cp::to_json(cp::check_spectrum(m), run.error)}};
            write_file(out_path, doc.dump(2) + "\n");
        }
    } else if (!out_path.empty()) {
        write_file(out_path, cp::json{{"suites", j}}.dump(2) + "\n");
    }
    return all_ok ? ok : suite_failure;
}

// "a..b" or a single value.
std::pair<double, double> parse_range(const std::string& s) {
    auto pos = s.find("..");
    try {
        if (pos == std::string::npos) {
            double v = std::stod(s);
            return {v, v};
        }
        return {std::stod(s.substr(0, pos)), std::stod(s.substr(pos + 2))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("range", "expected a..b, got '" + s + "'");
    }
}

int cmd_sweep(const std::string& vary, const std::string& factor, const std::string& target,
              std::size_t points, std::uint64_t seed, const std::string& out_path) {
    cp::SweepOptions opt;
    opt.seed = seed;
    std::vector<cp::SweepRow> rows;
    if (!vary.empty()) {
        auto eq = vary.find('=');
        if (eq == std::string::npos || vary.substr(0, eq) != "n")
            throw CLI::ValidationError("--vary", "expected n=a..b");
        auto [lo, hi] = parse_range(vary.substr(eq + 1));
        if (lo < 2 || hi < lo) throw CLI::ValidationError("--vary", "need 2 <= a <= b");
        rows = cp::sweep_robot_count(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi), opt);
    } else {
        auto [lo, hi] = parse_range(factor);
        if (!(lo > 0.0) || hi < lo) throw CLI::ValidationError("--factor", "need 0 < a <= b");
        std::vector<double> fs;
        if (lo == hi || points <= 1) {
            fs.push_back(lo);
        } else {
            for (std::size_t k = 0; k < points; ++k)
                fs.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(points - 1)));
        }
        auto t = target == "speed" ? cp::FactorTarget::speed
                 : target == "both" ? cp::FactorTarget::both
                                    : cp::FactorTarget::radius;
        rows = cp::sweep_factor(fs, t, opt);
    }
    std::ostringstream csv;
    csv << "sweep,n,factor,t_star,t_rev_predicted,t_rev_measured,relative_error\n";
    bool agree = true;
    for (const auto& r : rows) {
        auto err = r.relative_error();
        agree = agree && err && *err < 0.01;
        csv << r.sweep << ',' << r.n << ',' << cp::fmt9(r.factor) << ',' << cp::fmt9(r.t_star) << ','
            << cp::fmt9(r.predicted) << ',' << cp::fmt9(r.measured.value_or(NAN)) << ','
            << cp::fmt9(err.value_or(NAN)) << '\n';
    }
    emit(out_path, csv.str());
    return agree ? ok : suite_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and analysis toolkit for distributed patrolling on a cycle"};
    app.require_subcommand(1);

    std::string tasks_path, method = "mst", tour_out;
    auto* tour = app.add_subcommand("tour", "Build the cycle graph from task locations");
    tour->add_option("tasks", tasks_path, "Task set JSON")->required()->check(CLI::ExistingFile);
    tour->add_option("--method", method, "Tour construction")->check(CLI::IsMember({"mst", "nn"}));
    tour->add_option("-o,--out", tour_out, "Output path (default stdout)");

    SimulateArgs sim;
    double until = 0.0;
    std::size_t events = 0;
    auto* simulate = app.add_subcommand("simulate", "Run the protocol and write trace and report");
    simulate->add_option("fleet", sim.fleet_path, "Fleet JSON")->required()->check(CLI::ExistingFile);
    auto* until_opt = simulate->add_option("--until", until, "Horizon in seconds")->check(CLI::PositiveNumber);
    auto* events_opt = simulate->add_option("--events", events, "Horizon in events")->check(CLI::PositiveNumber);
    until_opt->excludes(events_opt);
    simulate->add_option("--seed", sim.seed, "Seed for positions/orientations missing from the fleet file");
    simulate->add_option("-o,--out", sim.out_dir, "Output directory");

    std::string suite = "all", verify_out;
    std::uint64_t verify_seed = 1;
    auto* verify = app.add_subcommand("verify", "Run property suites");
    verify->add_option("--suite", suite, "Suite to run")
        ->check(CLI::IsMember({"consensus", "words", "rounds", "conservation", "all"}));
    verify->add_option("--seed", verify_seed, "Seed for randomized cases");
    verify->add_option("-o,--out", verify_out, "JSON report path");

    std::string vary, factor, target = "radius", sweep_out;
    std::size_t points = 8;
    std::uint64_t sweep_seed = 1;
    auto* sweep = app.add_subcommand("sweep", "Revisiting time against team size or capability");
    auto* vary_opt = sweep->add_option("--vary", vary, "Robot count range, n=a..b");
    auto* factor_opt = sweep->add_option("--factor", factor, "Capability factor range, a..b");
    vary_opt->excludes(factor_opt);
    sweep->add_option("--target", target, "Scaled capability of robots 1-2")
        ->check(CLI::IsMember({"radius", "speed", "both"}));
    sweep->add_option("--points", points, "Factor values in the range");
    sweep->add_option("--seed", sweep_seed, "Seed for placements");
    sweep->add_option("-o,--out", sweep_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
        if (*sweep && vary.empty() && factor.empty())
            throw CLI::RequiredError("sweep needs --vary or --factor");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*tour) return cmd_tour(tasks_path, method, tour_out);
        if (*simulate) {
            if (*until_opt) sim.until = until;
            if (*events_opt) sim.events = events;
            return cmd_simulate(sim);
        }
        if (*verify) return cmd_verify(suite, verify_seed, verify_out);
        if (*sweep) return cmd_sweep(vary, factor, target, points, sweep_seed, sweep_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const cp::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const cp::DeadlockError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return suite_failure;
    }
    return usage;
}
