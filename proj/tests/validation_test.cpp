#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lobsim/error.hpp"
#include "lobsim/io/config.hpp"
#include "lobsim/io/default_configs.hpp"
#include "lobsim/rng.hpp"
#include "lobsim/validation/cross_scale.hpp"
#include "lobsim/validation/generator.hpp"
#include "lobsim/validation/stats.hpp"

using namespace lobsim;
using namespace lobsim::validation;

TEST_CASE("ks_distance examples") {
    Rng rng = make_stream(1);
    std::vector<double> a(1000), b(1000);
    for (double& x : a) x = draw_uniform(rng);
    SUBCASE("identical samples") {
        const auto r = ks_distance(a, a);
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
    }
    SUBCASE("shifted uniforms") {
        for (double& x : b) x = 0.5 + draw_uniform(rng);
        const auto r = ks_distance(a, b);
        CHECK(r.statistic == doctest::Approx(0.5).epsilon(0.1));
        CHECK(r.p_value < 1e-10);
    }
    SUBCASE("two normal samples pass for at least two of three seeds") {
        int passed = 0;
        for (std::uint64_t seed : {1, 2, 3}) {
            Rng r = make_stream(100 + seed);
            for (double& x : a) x = draw_normal(r);
            for (double& x : b) x = draw_normal(r);
            passed += ks_distance(a, b).p_value > 0.01;
        }
        CHECK(passed >= 2);
    }
    CHECK_THROWS_AS(ks_distance({}, a), std::domain_error);
}

TEST_CASE("Kolmogorov survival function") {
    CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.2699996716735).epsilon(1e-9));
    CHECK(kolmogorov_survival(1.358) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_survival(1.628) == doctest::Approx(0.01).epsilon(2e-3));
    CHECK(kolmogorov_survival(0.0) == 1.0);
}

TEST_CASE("reflected_bm_moment") {
    CHECK(reflected_bm_moment(1.0, 1.0) == doctest::Approx(0.7978845608).epsilon(1e-10));
    CHECK(reflected_bm_moment(0.0, 3.0) == 0.0);
    CHECK(reflected_bm_moment(2.0, 0.25) == doctest::Approx(0.7978845608).epsilon(1e-10));
    Rng rng = make_stream(2);
    for (int k = 0; k < 1000; ++k) {
        const double s = 5 * draw_uniform(rng), t = 5 * draw_uniform(rng);
        CHECK(reflected_bm_moment(s, t) == doctest::Approx(s * std::sqrt(t) * reflected_bm_moment(1, 1)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(reflected_bm_moment(-1.0, 1.0), std::domain_error);
}

TEST_CASE("chi_square_poisson") {
    int passed = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        std::mt19937_64 gen(seed);
        std::poisson_distribution<std::int64_t> pois(40.0);
        std::vector<std::int64_t> counts(500);
        for (auto& c : counts) c = pois(gen);
        const auto r = chi_square_poisson(counts, 40.0);
        double total = 0;
        for (double e : r.expected) total += e;
        CHECK(total == doctest::Approx(500.0));
        CHECK(r.dof == static_cast<int>(r.bin_edges.size()) - 1);
        passed += r.p_value > 0.01;
    }
    CHECK(passed >= 2);
    std::vector<std::int64_t> wrong(500, 50);
    CHECK(chi_square_poisson(wrong, 40.0).p_value < 1e-10);
    CHECK_THROWS_AS(chi_square_poisson({}, 40.0), std::domain_error);
}

TEST_CASE("ensemble cells") {
    const std::vector<double> s{3, 1, 2, 2, 5};
    const auto c = EnsembleSummary::make_cell(0.5, -2, s, 5);
    CHECK(c.mean == doctest::Approx(2.6));
    CHECK(c.variance == doctest::Approx(2.3));
    CHECK(c.cdf.back() == 1.0);
    CHECK(std::is_sorted(c.cdf.begin(), c.cdf.end()));
    const auto m = summarize(s);
    CHECK(m.std_error == doctest::Approx(std::sqrt(2.3 / 5)));
}

namespace {

TestFunction quadratic(std::size_t k) {
    return {[k](std::span<const double> x) { return x[k] * x[k]; },
            [k](std::span<const double> x, std::span<double> g) {
                std::fill(g.begin(), g.end(), 0.0);
                g[k] = 2 * x[k];
            },
            [k](std::span<const double>, std::span<double> h) {
                std::fill(h.begin(), h.end(), 0.0);
                h[k] = 2;
            }};
}

CoefficientSet coeffs(double sigma, double f, double g, double alpha) {
    SideCoefficients c;
    c.sigma.base = Profile::constant(sigma);
    c.limit_rate.base = Profile::constant(f);
    c.cancel_rate.base = Profile::constant(g);
    c.alpha = alpha;
    return CoefficientSet::symmetric(c);
}

} // namespace

TEST_CASE("limit generator by hand") {
    // N = 3: state (b1, b2, a1, a2); F = b1^2.
    const auto c = coeffs(0.8, 0.5, 0.2, 0.3);
    const RealBook x({1.5, 0.5}, {1.0, 2.0});
    const double drift = 0.5 - 0.2 + 0.3 * (0.5 - 2 * 1.5);
    CHECK(limit_generator(c, 3, quadratic(0), x) == doctest::Approx(0.5 * 0.64 * 2 + drift * 3.0));
}

TEST_CASE("generator residual of a constant is exactly zero") {
    const TestFunction one{[](std::span<const double>) { return 1.0; },
                           [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); },
                           [](std::span<const double>, std::span<double> h) { std::fill(h.begin(), h.end(), 0.0); }};
    for (auto c : {coeffs(1, 0, 0, 0), coeffs(0.7, 0.4, 0.1, 0.5)}) {
        const auto r = generator_residual(c, 3, one, RealBook({0.1, 0.0}, {0.2, 0.3}), 0.05, 100.0, 50, 3);
        CHECK(r.generator == 0.0);
        CHECK(r.estimate == 0.0);
        CHECK(r.residual == 0.0);
    }
}

TEST_CASE("generator residual input checks") {
    const auto c = coeffs(1, 0, 0, 0);
    // x itself has derivative 1 on the face x = 0.
    const TestFunction linear{[](std::span<const double> x) { return x[0]; },
                              [](std::span<const double>, std::span<double> g) {
                                  std::fill(g.begin(), g.end(), 0.0);
                                  g[0] = 1.0;
                              },
                              [](std::span<const double>, std::span<double> h) { std::fill(h.begin(), h.end(), 0.0); }};
    CHECK_THROWS_AS(generator_residual(c, 2, linear, RealBook({1.0}, {1.0}), 0.01, 100, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(generator_residual(c, 2, quadratic(0), RealBook({0.15}, {1.0}), 0.01, 100, 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(generator_residual(c, 2, quadratic(0), RealBook({1.0}, {1.0}), 0.0, 100, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("x^2 at zero in a short Monte Carlo") {
    // E Z(t)^2 = sigma^2 t exactly for the reflected walk, so the estimate
    // is unbiased and matches A F(0) = sigma^2.
    const auto r = generator_residual(coeffs(1, 0, 0, 0), 2, quadratic(0), RealBook({0.0}, {1.0}), 1e-2, 1e4, 20000, 5);
    CHECK(r.generator == doctest::Approx(1.0));
    CHECK(std::abs(r.residual) < 3.0 * r.std_error);
}

TEST_CASE("trivial ladder passes and is deterministic") {
    std::istringstream in{std::string(io::default_ladder_config(LadderKind::trivial))};
    auto cfg = io::parse_config(in).ladder;
    cfg.paths = 400;
    const auto a = cross_scale_report(cfg);
    const auto b = cross_scale_report(cfg);
    CHECK(a.pass);
    CHECK(a.seeds_passed >= 2);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_text().find("PASS") != std::string::npos);
    for (const auto& c : a.cells) {
        CHECK(c.statistic >= 0.0);
        CHECK(c.p_value <= 1.0);
    }
}

TEST_CASE("ladder configuration checks") {
    CHECK(parse_ladder_kind("micro") == LadderKind::micro_meso);
    CHECK(parse_ladder_kind("meso") == LadderKind::meso_macro);
    CHECK_THROWS_AS(parse_ladder_kind("macro"), ConfigError);
    std::istringstream in{std::string(io::default_ladder_config(LadderKind::trivial))};
    LadderConfig c = io::parse_config(in).ladder;
    CHECK_NOTHROW(c.validate());
    c.paths = 5000;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.paths = 100;
    c.checkpoints = {0.2, 0.1};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.checkpoints = {0.1};
    c.kind = LadderKind::meso_macro;
    c.rungs = {10, 20.5};
    c.positions = {0.5};
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
