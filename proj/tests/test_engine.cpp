#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "cyclepatrol/io.hpp"
#include "cyclepatrol/random.hpp"
#include "cyclepatrol/simulator.hpp"
#include "cyclepatrol/time_form.hpp"

namespace cp = cyclepatrol;

namespace {

cp::FleetConfig make(double L, std::vector<double> v, std::vector<double> r) {
    cp::FleetConfig f;
    f.length = L;
    for (std::size_t i = 0; i < v.size(); ++i) f.robots.push_back({static_cast<int>(i + 1), v[i], r[i]});
    return f;
}

cp::FleetConfig four_robots() { return make(1000, {0.3, 0.7, 0.3, 0.3}, {50, 50, 50, 150}); }

cp::FleetConfig eight() {
    return make(1000, {0.6, 0.1, 0.5, 0.3, 0.7, 0.2, 0.8, 0.4}, {20, 20, 50, 20, 20, 20, 100, 20});
}

std::string assumption_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const cp::ValidationError& e) {
        return std::string(e.what()).substr(0, 11);
    }
    return "";
}

std::string csv_of(const cp::Trace& tr) {
    std::ostringstream os;
    cp::write_trace_csv(os, tr);
    return os.str();
}

}  // namespace

TEST(Init, TwoRobotState) {
    auto s = cp::init(make(2, {1, 1}, {0, 0}), {0.5, 1.5}, {1, -1});
    EXPECT_EQ(s.n(), 2u);
    EXPECT_FALSE(s.boundaries[0].has_value());
    EXPECT_EQ(*s.boundaries[1], 2.0);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(s.robots[i].a, 1);
        EXPECT_EQ(s.phase(i), cp::Phase::discovering);
    }
}

TEST(Init, UniformOrientationViolatesA2) {
    EXPECT_EQ(assumption_of([] { cp::init(make(100, {1, 1, 1}, {0, 0, 0}), {10, 20, 30}, {1, 1, 1}); }),
              "A2 violated");
    EXPECT_EQ(assumption_of([] { cp::init(make(100, {1, 1}, {0, 0}), {10, 20}, {-1, -1}); }), "A2 violated");
}

TEST(Init, OverlappingZonesViolateA3) {
    EXPECT_EQ(assumption_of([] { cp::init(make(100, {1, 1}, {6, 6}), {10, 20}, {1, -1}); }), "A3 violated");
    // Touching zones are allowed.
    EXPECT_NO_THROW(cp::init(make(100, {1, 1}, {5, 5}), {10, 20}, {1, -1}));
}

TEST(Init, UnsortedOrSeamCrossingViolateA3) {
    EXPECT_EQ(assumption_of([] { cp::init(make(100, {1, 1}, {0, 0}), {20, 10}, {1, -1}); }), "A3 violated");
    EXPECT_EQ(assumption_of([] { cp::init(make(100, {1, 1}, {5, 5}), {3, 50}, {1, -1}); }), "A3 violated");
    EXPECT_EQ(assumption_of([] { cp::init(make(100, {1, 1}, {5, 5}), {50, 97}, {1, -1}); }), "A3 violated");
}

TEST(NextEvent, HeadOnApproach) {
    auto s = cp::init(make(100, {1, 1.5}, {0, 0}), {10, 30}, {1, -1});
    auto ev = cp::next_event(s);
    EXPECT_EQ(ev.kind, cp::EventKind::discovery);
    EXPECT_DOUBLE_EQ(ev.time, 20.0 / 2.5);
    EXPECT_EQ(ev.boundary, 0u);
}

TEST(NextEvent, ArrivalAtKnownBoundary) {
    auto s = cp::init(make(100, {2, 1}, {1, 1}), {10, 40}, {1, -1});
    s.boundaries[0] = 30.0;
    // Robot 0 heads for its contact point 29: 19 m at 2 m/s. Robot 1 waits
    // facing away, so this is a plain arrival.
    s.robots[1].o = 1;
    s.robots[1].a = 0;
    auto ev = cp::next_event(s);
    EXPECT_EQ(ev.kind, cp::EventKind::arrival);
    EXPECT_EQ(ev.robot_a, 0u);
    EXPECT_DOUBLE_EQ(ev.time, 9.5);
}

TEST(NextEvent, CatchStoppedNeighbour) {
    auto s = cp::init(make(100, {2, 1}, {0, 0}), {10, 16}, {1, -1});
    s.robots[1].o = 1;
    s.robots[1].a = 0;
    auto ev = cp::next_event(s);
    EXPECT_EQ(ev.kind, cp::EventKind::catch_up);
    EXPECT_EQ(ev.robot_a, 0u);
    EXPECT_DOUBLE_EQ(ev.time, 3.0);
}

TEST(NextEvent, EqualSpeedSameDirectionNeverTouch) {
    auto s = cp::init(make(100, {1, 1, 1}, {0, 0, 0}), {10, 20, 60}, {1, 1, -1});
    auto ev = cp::next_event(s);
    // Only robots 1 and 2 close the gap.
    EXPECT_EQ(ev.boundary, 1u);
    EXPECT_EQ(ev.kind, cp::EventKind::discovery);
}

TEST(NextEvent, DeadlockWhenEveryoneStops) {
    auto s = cp::init(make(100, {1, 1}, {0, 0}), {10, 20}, {1, -1});
    s.robots[0].a = 0;
    s.robots[1].a = 0;
    EXPECT_THROW(cp::next_event(s), cp::DeadlockError);
}

TEST(Discovery, BoundaryAtContactPointPlusRadius) {
    cp::Simulator sim(cp::init(make(20, {1, 1}, {0.5, 0.5}), {5.5, 10.5}, {1, -1}));
    auto ev = sim.step();
    EXPECT_EQ(ev.kind, cp::EventKind::discovery);
    EXPECT_DOUBLE_EQ(ev.time, 2.0);
    const auto& s = sim.state();
    EXPECT_DOUBLE_EQ(s.robots[0].p, 7.5);
    EXPECT_DOUBLE_EQ(*s.boundaries[0], 8.0);
    EXPECT_EQ(s.robots[0].o, -1);
    EXPECT_EQ(s.robots[1].o, 1);
}

TEST(Catch, CatcherWaitsAtContactPoint) {
    auto s = cp::init(make(100, {2, 1}, {1, 1}), {10, 18}, {1, -1});
    s.robots[1].a = 0;
    s.robots[1].o = 1;
    s.robots[0].o = 1;
    auto ev = cp::next_event(s);
    ASSERT_EQ(ev.kind, cp::EventKind::catch_up);
    cp::advance(s, ev.time);
    cp::apply_event(s, ev);
    EXPECT_EQ(s.robots[0].a, 0);
    EXPECT_DOUBLE_EQ(*s.boundaries[0], 17.0);
    EXPECT_DOUBLE_EQ(s.robots[0].p, 16.0);
    EXPECT_EQ(s.robots[1].o, 1);
}

TEST(Arrival, PinsToContactPoint) {
    auto s = cp::init(make(200, {1, 1}, {10, 10}), {50, 150}, {1, -1});
    s.boundaries[0] = 100.0;
    s.robots[1].a = 0;
    s.robots[1].o = 1;
    auto ev = cp::next_event(s);
    ASSERT_EQ(ev.kind, cp::EventKind::arrival);
    cp::advance(s, ev.time);
    cp::apply_event(s, ev);
    EXPECT_EQ(s.robots[0].p, 90.0);
    EXPECT_EQ(s.robots[0].a, 0);
}

TEST(Arrival, NeighbourWaitingTurnsItIntoMeeting) {
    auto s = cp::init(make(200, {1, 1}, {10, 10}), {50, 110}, {1, -1});
    s.boundaries[0] = 100.0;
    s.robots[1].a = 0;
    auto ev = cp::next_event(s);
    EXPECT_EQ(ev.kind, cp::EventKind::meeting);
    EXPECT_EQ(ev.robot_a, 0u);
    EXPECT_EQ(*ev.robot_b, 1u);
}

TEST(Arrival, BackwardRobotWaitsAtSeam) {
    auto s = cp::init(make(200, {1, 1}, {10, 10}), {30, 150}, {-1, 1});
    s.boundaries[0] = 100.0;
    // Robot 0 reaches 10 at t=20, robot 1 reaches 190 at t=40.
    auto ev = cp::next_event(s);
    ASSERT_EQ(ev.kind, cp::EventKind::arrival);
    EXPECT_EQ(ev.boundary, 1u);
    cp::advance(s, ev.time);
    cp::apply_event(s, ev);
    EXPECT_EQ(s.robots[0].p, 10.0);
    EXPECT_EQ(s.robots[0].a, 0);
}

TEST(Meeting, BoundaryRuleExamples) {
    EXPECT_DOUBLE_EQ(cp::meeting_boundary(0, 10, {1, 1, 0}, {2, 1, 0}), 5.0);
    const double y = cp::meeting_boundary(0, 20, {1, 1, 2}, {2, 3, 1});
    EXPECT_DOUBLE_EQ(y, 7.5);
    EXPECT_DOUBLE_EQ(cp::traversing_time(y - 0, 1, 2), 3.5);
    EXPECT_DOUBLE_EQ(cp::traversing_time(20 - y, 3, 1), 3.5);
}

TEST(Meeting, UpdatesSharedBoundaryAndReverses) {
    auto s = cp::init(make(60, {1, 3, 1}, {2, 1, 0}), {5, 15, 40}, {1, -1, 1});
    s.boundaries[0] = 12.0;
    s.boundaries[1] = 20.0;
    s.robots[0].p = 10.0;
    s.robots[1].p = 13.0;
    s.robots[0].a = 0;
    s.robots[1].a = 0;
    const double sum_d = *s.boundaries[1] - 0.0;
    cp::apply_meeting(s, 0);
    EXPECT_DOUBLE_EQ(*s.boundaries[0], 7.5);
    EXPECT_DOUBLE_EQ(*s.traversing_time(0), 3.5);
    EXPECT_DOUBLE_EQ(*s.traversing_time(1), 3.5);
    EXPECT_DOUBLE_EQ((*s.boundaries[0] - 0.0) + (*s.boundaries[1] - *s.boundaries[0]), sum_d);
    EXPECT_EQ(s.robots[0].o, -1);
    EXPECT_EQ(s.robots[1].o, 1);
    EXPECT_EQ(s.robots[0].a, 1);
    EXPECT_EQ(s.robots[1].a, 1);
}

TEST(Meeting, SeamBoundaryNeverMoves) {
    auto s = cp::init(make(60, {1, 3}, {0, 0}), {10, 50}, {-1, 1});
    s.boundaries[0] = 30.0;
    cp::apply_meeting(s, 1);
    EXPECT_EQ(*s.boundaries[1], 60.0);
    EXPECT_EQ(s.robots[1].o, -1);
    EXPECT_EQ(s.robots[0].o, 1);
}

TEST(Run, FourRobotFleetConvergesToTStar) {
    cp::Simulator sim(cp::init(four_robots(), {100, 350, 600, 850}, {1, -1, 1, -1}));
    sim.run_until(1e6);
    for (double e : sim.state().e_vector()) EXPECT_NEAR(e, 250.0, 0.25);
    EXPECT_TRUE(sim.trace().convergence_time.has_value());
}

TEST(Run, SymmetricPairIsPeriodicAfterFirstMeeting) {
    cp::Simulator sim(cp::init(make(100, {1, 1}, {0, 0}), {20, 60}, {1, -1}));
    sim.run_until(2000);
    std::vector<double> meets;
    for (const auto& en : sim.trace().entries) {
        if (en.event.kind != cp::EventKind::meeting || en.event.boundary != 0) continue;
        meets.push_back(en.event.time);
        EXPECT_EQ(en.y[0], 50.0);
    }
    ASSERT_GT(meets.size(), 10u);
    // The first gap includes the discovery transient.
    for (std::size_t k = 2; k < meets.size(); ++k) EXPECT_EQ(meets[k] - meets[k - 1], 100.0);
}

TEST(Run, EmptyHorizonGivesEmptyTrace) {
    cp::Simulator sim(cp::init(four_robots(), {100, 350, 600, 850}, {1, -1, 1, -1}));
    sim.run_until(0.0);
    EXPECT_TRUE(sim.trace().entries.empty());
}

TEST(Run, EventTimesNeverDecrease) {
    cp::Simulator sim(cp::init(eight(), {50, 160, 290, 400, 510, 640, 800, 950}, {1, -1, -1, 1, 1, -1, 1, -1}));
    sim.run_events(20000);
    double last = 0.0;
    for (const auto& en : sim.trace().entries) {
        EXPECT_GE(en.event.time, last);
        last = en.event.time;
    }
}

TEST(Run, DeterministicTraceBytes) {
    auto run = [] {
        cp::Rng rng(99);
        auto f = eight();
        auto p = cp::random_positions(f, rng);
        auto o = cp::random_orientations(f.size(), rng);
        cp::Simulator sim(cp::init(f, p, o));
        sim.run_events(5000);
        return csv_of(sim.trace());
    };
    EXPECT_EQ(run(), run());
}

TEST(ParameterChange, HalvedSpeedReconverges) {
    auto f = eight();
    cp::Simulator sim(cp::init(f, {50, 160, 290, 400, 510, 640, 800, 950}, {1, -1, 1, -1, 1, -1, 1, -1}));
    sim.schedule({50000.0, 5, 0.35, std::nullopt});
    sim.run_until(400000);
    f.robots[4].v = 0.35;
    const double t_new = cp::compute_t_star(f);
    EXPECT_NEAR(t_new, 460.0 / 3.25, 1e-12);
    EXPECT_DOUBLE_EQ(sim.t_star(), t_new);
    ASSERT_EQ(sim.trace().changes.size(), 1u);
    for (double e : sim.state().e_vector()) EXPECT_NEAR(e, t_new, 1e-3 * t_new);
    EXPECT_TRUE(sim.trace().convergence_time.has_value());
    EXPECT_GT(*sim.trace().convergence_time, 50000.0);
}

TEST(ParameterChange, NoOpLeavesTraceUnchanged) {
    auto f = eight();
    std::vector<double> p{50, 160, 290, 400, 510, 640, 800, 950};
    std::vector<int> o{1, -1, 1, -1, 1, -1, 1, -1};
    cp::Simulator a(cp::init(f, p, o)), b(cp::init(f, p, o));
    b.schedule({3000.0, 5, 0.7, 20.0});
    a.run_until(20000);
    b.run_until(20000);
    EXPECT_TRUE(b.trace().changes.empty());
    EXPECT_EQ(csv_of(a.trace()), csv_of(b.trace()));
}

TEST(ParameterChange, StaticCoverageRejected) {
    cp::Simulator sim(cp::init(four_robots(), {100, 350, 600, 850}, {1, -1, 1, -1}));
    sim.run_until(1000);
    EXPECT_THROW(sim.apply_parameter_change(3, std::nullopt, 400.0), cp::StaticCoverageError);
    EXPECT_THROW(sim.apply_parameter_change(3, -1.0, std::nullopt), cp::ValidationError);
}

TEST(Invariants, RandomRunsKeepProtocolProperties) {
    cp::Rng rng(2024);
    for (int run = 0; run < 40; ++run) {
        const std::size_t n = 2 + rng.below(15);
        cp::FleetConfig f;
        f.length = 1000;
        for (std::size_t i = 0; i < n; ++i)
            f.robots.push_back({static_cast<int>(i + 1), rng.uniform(0.1, 2), rng.uniform(0, 0.4 * 1000 / (2.0 * n))});
        auto p = cp::random_positions(f, rng);
        auto o = cp::random_orientations(n, rng);
        cp::Simulator sim(cp::init(f, p, o));
        int osum = 0;
        for (int x : o) osum += x;
        const double weighted = f.length - 2 * cp::total_radius(f);
        std::vector<double> since(n, 0.0);
        for (int k = 0; k < 2500; ++k) {
            auto ev = sim.step();
            const auto& s = sim.state();
            int sum = 0;
            for (const auto& r : s.robots) sum += r.o;
            ASSERT_EQ(sum, osum);
            ASSERT_EQ(*s.boundaries[n - 1], f.length);
            double prev = 0.0;
            for (std::size_t b = 0; b < n; ++b)
                if (s.boundaries[b]) {
                    ASSERT_LT(prev, *s.boundaries[b]);
                    prev = *s.boundaries[b];
                }
            // Order holds at the event level: events only involve the two robots
            // around their boundary and a waiting robot sits at its own contact point.
            // Physical positions may swap briefly after a boundary moves.
            ASSERT_TRUE(ev.robot_a == ev.boundary || ev.robot_a == (ev.boundary + 1) % n);
            if (ev.robot_b) {
                ASSERT_TRUE(*ev.robot_b == ev.boundary || *ev.robot_b == (ev.boundary + 1) % n);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const auto& rb = s.robots[i];
                auto y = rb.o > 0 ? s.right_boundary(i) : s.left_boundary(i);
                if (rb.a != 0 || !y) continue;
                ASSERT_NEAR(rb.p, rb.o > 0 ? *y - rb.params.r : *y + rb.params.r, 1e-9 * f.length);
            }
            if (s.all_known()) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += s.robots[i].params.v * *s.traversing_time(i);
                ASSERT_NEAR(acc, weighted, 1e-9 * f.length);
            }
            if (ev.kind == cp::EventKind::meeting && ev.boundary != n - 1 && s.all_known()) {
                ASSERT_NEAR(*s.traversing_time(ev.boundary), *s.traversing_time(ev.boundary + 1),
                            1e-9 * sim.t_star());
            }
            // Bounded activity: an active robot reaches a boundary within L/v.
            since[ev.robot_a] = ev.time;
            if (ev.robot_b) since[*ev.robot_b] = ev.time;
            for (std::size_t i = 0; i < n; ++i) {
                if (s.robots[i].a == 0) since[i] = s.time;
                ASSERT_LE(s.time - since[i], f.length / s.robots[i].params.v + 1e-6);
            }
        }
    }
}

TEST(TimeForm, AtDepartureReplaysEngineEvents) {
    cp::Rng rng(5);
    for (int run = 0; run < 10; ++run) {
        auto f = eight();
        auto p = cp::random_positions(f, rng);
        auto o = cp::random_orientations(f.size(), rng);
        cp::Simulator sim(cp::init(f, p, o));
        while (!sim.state().all_known()) sim.step();
        cp::TimeFormSimulator tf(sim.state(), cp::TripDuration::at_departure);
        for (int k = 0; k < 1000; ++k) {
            auto a = sim.step();
            auto b = tf.step();
            ASSERT_EQ(a.kind, b.kind);
            ASSERT_EQ(a.boundary, b.boundary);
            ASSERT_NEAR(a.time, b.time, 1e-9 * std::max(1.0, a.time));
        }
        auto ea = sim.state().e_vector(), eb = tf.e_vector();
        for (std::size_t i = 0; i < ea.size(); ++i) EXPECT_NEAR(ea[i], eb[i], 1e-9);
    }
}

TEST(TimeForm, PostUpdateMatchesOnConvergedFleet) {
    auto f = four_robots();
    cp::Simulator sim(cp::init(f, {100, 350, 600, 850}, {1, -1, 1, -1}));
    sim.run_until(2e6);
    // Make the partition exact so both trip durations coincide.
    ASSERT_LT(cp::max_relative_deviation(sim.state().e_vector(), 250.0), 1e-12);
    cp::TimeFormSimulator tf(sim.state(), cp::TripDuration::post_update);
    for (int k = 0; k < 1000; ++k) {
        auto a = sim.step();
        auto b = tf.step();
        ASSERT_EQ(a.kind, b.kind);
        ASSERT_EQ(a.boundary, b.boundary);
        ASSERT_NEAR(a.time, b.time, 1e-9 * std::max(1.0, a.time));
    }
}

TEST(TimeForm, PostUpdateDivergesDuringTransient) {
    auto f = eight();
    cp::Simulator sim(cp::init(f, {50, 160, 290, 400, 510, 640, 800, 950}, {1, -1, 1, -1, 1, -1, 1, -1}));
    while (!sim.state().all_known()) sim.step();
    cp::TimeFormSimulator tf(sim.state(), cp::TripDuration::post_update);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        auto a = sim.step();
        auto b = tf.step();
        worst = std::max(worst, std::abs(a.time - b.time));
        if (a.kind != b.kind || a.boundary != b.boundary) {
            worst = INFINITY;
            break;
        }
    }
    EXPECT_GT(worst, 1e-6);
}
