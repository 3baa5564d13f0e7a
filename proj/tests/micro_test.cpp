#include "doctest.h"

#include <cmath>

#include "lobsim/error.hpp"
#include "lobsim/micro/micro_sim.hpp"
#include "lobsim/validation/stats.hpp"

using namespace lobsim;
using micro::EventKind;
using micro::StepOutcome;

namespace {

micro::MicroModel model(int N, double sigma, double f, double g, double alpha, double n = 1.0) {
    micro::MicroModel m;
    m.grid.num_ticks = N;
    SideCoefficients c;
    c.sigma.base = Profile::constant(sigma);
    c.limit_rate.base = Profile::constant(f);
    c.cancel_rate.base = Profile::constant(g);
    c.alpha = alpha;
    m.coeffs = CoefficientSet::symmetric(c);
    m.n = n;
    m.price_dynamics = false;
    return m;
}

} // namespace

TEST_CASE("frozen book signals") {
    const auto m = model(3, 0, 0, 0, 0);
    Rng rng = make_stream(1);
    MicroBook b({2, 1}, {0, 3});
    const auto o = micro::step_micro(b, m, rng);
    CHECK(o.status == StepOutcome::Status::frozen);
    CHECK(b == MicroBook({2, 1}, {0, 3}));
    const auto path = micro::simulate_micro(b, m, 10.0, rng);
    CHECK(path.frozen);
    CHECK(path.event_count == 0);
}

TEST_CASE("empty queue with only volatility can only grow") {
    // sigma^2 = 2 at Z = 0: the add rate is 2, nothing else can fire.
    const auto m = model(2, std::sqrt(2.0), 0, 0, 0);
    micro::MicroSimulator sim(m, MicroBook(1));
    CHECK(sim.total_rate() == doctest::Approx(4.0));  // both sides
    Rng rng = make_stream(2);
    for (int k = 0; k < 1000; ++k) {
        MicroBook b(1);
        const auto o = micro::step_micro(b, m, rng);
        REQUIRE(o.status == StepOutcome::Status::book_event);
        CHECK(o.event.kind == EventKind::add);
    }
}

TEST_CASE("competing clocks pick add with probability a / (a + r)") {
    // Z = 1, sigma = 0: add rate f, remove rate g.
    const double a = 1.5, r = 0.5;
    const auto m = model(2, 0, a, r, 0);
    Rng rng = make_stream(3);
    const int trials = 20000;
    int adds = 0;
    for (int k = 0; k < trials; ++k) {
        MicroBook b({1}, {0});
        // Ask side at Z = 0 has add rate a as well; condition on bid events.
        const auto o = micro::step_micro(b, m, rng);
        if (o.event.side != Side::bid) {
            --k;
            continue;
        }
        adds += o.event.kind == EventKind::add;
    }
    const double p = a / (a + r);
    const double freq = static_cast<double>(adds) / trials;
    CHECK(std::abs(freq - p) < 3.0 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("exogenous price clock gives Poisson(2 delta T) changes") {
    auto m = model(3, 0, 0, 0, 0, 4.0);
    m.price_dynamics = true;
    m.price = {0.0, 2.0, 1.0 / 3};
    const double T = 5.0;
    std::vector<double> counts;
    for (int r = 0; r < 400; ++r) {
        Rng rng = make_stream(4, r);
        const auto path = micro::simulate_micro(MicroBook(2), m, m.n * T, rng);
        counts.push_back(static_cast<double>(path.price_events.size()));
    }
    const auto s = validation::summarize(counts);
    const double mean = 2.0 * 2.0 * T;
    CHECK(std::abs(s.mean - mean) < 3.0 * std::sqrt(mean / counts.size()));
}

TEST_CASE("price events move the mid and shift the book") {
    auto m = model(4, 0, 0, 0, 0);
    m.price_dynamics = true;
    m.price = {0.0, 1.0, 0.25};
    m.grid.jump_size = 0.01;
    Rng rng = make_stream(5);
    micro::MicroSimulator sim(m, MicroBook({1, 2, 3}, {4, 5, 6}, 10.0));
    const auto o = sim.step(rng);
    REQUIRE(o.status == StepOutcome::Status::price_event);
    const auto& ev = *o.price;
    CHECK(ev.bid == std::vector<double>{1, 2, 3});
    if (ev.direction == Direction::up) {
        CHECK(ev.new_mid == doctest::Approx(10.01));
        CHECK(sim.book().bid == std::vector<long long>{0, 1, 2});
        CHECK(sim.book().ask == std::vector<long long>{5, 6, 0});
    } else {
        CHECK(ev.new_mid == doctest::Approx(9.99));
        CHECK(sim.book().bid == std::vector<long long>{2, 3, 0});
        CHECK(sim.book().ask == std::vector<long long>{0, 4, 5});
    }
}

TEST_CASE("horizon zero returns the initial snapshot") {
    const auto m = model(3, 1, 1, 1, 1);
    Rng rng = make_stream(6);
    micro::MicroOptions o;
    o.snapshot_times = {0.0};
    const MicroBook init({3, 1}, {2, 2});
    const auto path = micro::simulate_micro(init, m, 0.0, rng, o);
    REQUIRE(path.snapshots.size() == 1);
    CHECK(path.snapshots[0].book == RealBook({3, 1}, {2, 2}));
    CHECK(path.event_count == 0);
    CHECK(path.final_book == init);
}

TEST_CASE("linear birth from an empty book") {
    // sigma = 0, alpha = 0: each level is a Poisson process of rate c.
    const double c = 1.0, t = 0.5;
    const int N = 5;
    const auto m = model(N, 0, c, 0, 0);
    std::vector<double> totals;
    for (int r = 0; r < 4000; ++r) {
        Rng rng = make_stream(7, r);
        const auto p = micro::simulate_micro(MicroBook(N - 1), m, t, rng);
        double v = 0;
        for (auto x : p.final_book.bid) v += static_cast<double>(x);
        totals.push_back(v);
    }
    const auto s = validation::summarize(totals);
    CHECK(std::abs(s.mean - c * (N - 1) * t) < 3.0 * s.std_error);
}

TEST_CASE("snapshots agree with replaying the event log") {
    const auto m = model(5, 1.0, 0.5, 0.5, 0.7, 9.0);
    micro::MicroOptions o;
    o.record_events = true;
    o.snapshot_times = {3.0, 11.0, 20.0};
    Rng rng = make_stream(8);
    const MicroBook init({2, 0, 1, 4}, {0, 3, 3, 1});
    const auto path = micro::simulate_micro(init, m, 20.0, rng, o);
    REQUIRE(path.snapshots.size() == 3);
    MicroBook b = init;
    std::size_t e = 0;
    double last = 0;
    for (const auto& snap : path.snapshots) {
        for (; e < path.events.size() && path.events[e].time <= snap.time; ++e) {
            const auto& ev = path.events[e];
            CHECK(ev.time >= last);
            last = ev.time;
            auto& v = b.side(ev.side);
            const auto l = static_cast<std::size_t>(ev.level - 1);
            switch (ev.kind) {
            case EventKind::add: ++v[l]; break;
            case EventKind::remove: --v[l]; break;
            case EventKind::move_left:
                --v[l];
                if (l > 0) ++v[l - 1];
                break;
            case EventKind::move_right:
                --v[l];
                if (l + 1 < v.size()) ++v[l + 1];
                break;
            }
            for (auto x : v) REQUIRE(x >= 0);
        }
        CHECK(RealBook(std::vector<double>(b.bid.begin(), b.bid.end()), std::vector<double>(b.ask.begin(), b.ask.end())) ==
              snap.book);
    }
    CHECK(b == path.final_book);
}

TEST_CASE("event cap raises a runaway error") {
    const auto m = model(3, 1, 1, 1, 1);
    Rng rng = make_stream(9);
    micro::MicroOptions o;
    o.event_cap = 100;
    CHECK_THROWS_AS(micro::simulate_micro(MicroBook(2), m, 1e6, rng, o), RunawayError);
}

TEST_CASE("identical seeds give identical event logs") {
    auto m = model(4, 1.0, 0.3, 0.2, 0.5, 16.0);
    m.price_dynamics = true;
    m.price = {3.0, 0.5, 0.25};
    micro::MicroOptions o;
    o.record_events = true;
    Rng r1 = make_stream(10), r2 = make_stream(10), r3 = make_stream(11);
    const MicroBook init({4, 4, 4}, {4, 4, 4});
    const auto a = micro::simulate_micro(init, m, 50.0, r1, o);
    const auto b = micro::simulate_micro(init, m, 50.0, r2, o);
    const auto c = micro::simulate_micro(init, m, 50.0, r3, o);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].time == b.events[i].time);
        CHECK(a.events[i].kind == b.events[i].kind);
        CHECK(a.events[i].level == b.events[i].level);
    }
    CHECK(a.final_book == b.final_book);
    CHECK(a.events.size() != c.events.size());
}

TEST_CASE("rescale_path") {
    micro::MicroPath p;
    p.events.push_back({8.0, Side::bid, 1, EventKind::add});
    p.snapshots.push_back({8.0, RealBook({6.0}, {2.0})});
    p.price_events.push_back({4.0, Direction::up, 1.5, {6.0}, {0.0}});
    SUBCASE("n = 4") {
        const auto r = micro::rescale_path(p, 4.0);
        CHECK(r.events[0].time == 2.0);
        CHECK(r.snapshots[0].time == 2.0);
        CHECK(r.snapshots[0].book.bid[0] == 3.0);
        CHECK(r.snapshots[0].book.ask[0] == 1.0);
        CHECK(r.price_events[0].time == 1.0);
        CHECK(r.price_events[0].new_mid == 1.5);
        CHECK(r.price_events[0].bid[0] == 3.0);
    }
    SUBCASE("n = 1 is the identity") {
        const auto r = micro::rescale_path(p, 1.0);
        CHECK(r.snapshots[0].book == p.snapshots[0].book);
        CHECK(r.events[0].time == 8.0);
    }
    SUBCASE("composition multiplies the indices") {
        Rng rng = make_stream(12);
        for (int k = 0; k < 200; ++k) {
            micro::MicroPath q;
            const double n1 = 1 + 20 * draw_uniform(rng), n2 = 1 + 20 * draw_uniform(rng);
            q.snapshots.push_back({100 * draw_uniform(rng), RealBook({50 * draw_uniform(rng)}, {3.0})});
            const auto two = micro::rescale_path(micro::rescale_path(q, n1), n2);
            const auto one = micro::rescale_path(q, n1 * n2);
            CHECK(two.snapshots[0].time == doctest::Approx(one.snapshots[0].time).epsilon(1e-14));
            CHECK(two.snapshots[0].book.bid[0] == doctest::Approx(one.snapshots[0].book.bid[0]).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(micro::rescale_path(p, 0.5), ConfigError);
}

TEST_CASE("initial data from a meso profile") {
    const auto b = micro::initial_from_meso(RealBook({0.5, 1.26}, {0.0, 2.0}, 3.0), 100.0);
    CHECK(b.bid == std::vector<long long>{5, 13});
    CHECK(b.ask == std::vector<long long>{0, 20});
    CHECK(b.mid == 3.0);
}

TEST_CASE("bad initial books are rejected") {
    const auto m = model(3, 1, 1, 1, 1);
    CHECK_THROWS_AS(micro::MicroSimulator(m, MicroBook(3)), ConfigError);
    CHECK_THROWS_AS(micro::MicroSimulator(m, MicroBook({-1, 0}, {0, 0})), ConfigError);
    auto bad = m;
    bad.n = 0.5;
    Rng rng = make_stream(13);
    CHECK_THROWS_AS(micro::simulate_micro(MicroBook(2), bad, 1.0, rng), ConfigError);
}

TEST_CASE("a horizon step keeps the book and moves the clock to the limit") {
    const auto m = model(3, 1, 1, 1, 1);
    micro::MicroSimulator sim(m, MicroBook({1, 1}, {1, 1}), 2.0);
    Rng rng = make_stream(14);
    const auto o = sim.step(rng, 2.0);
    CHECK(o.status == StepOutcome::Status::horizon);
    CHECK(sim.time() == 2.0);
    CHECK(sim.book() == MicroBook({1, 1}, {1, 1}));
}
