// Acceptance run: one PASS/FAIL line per criterion. Arguments select a
// subset by number (e.g. `lobsim_acceptance 1 8`); no arguments runs all.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lobsim/calibration/estimators.hpp"
#include "lobsim/calibration/lobster.hpp"
#include "lobsim/calibration/synthetic.hpp"
#include "lobsim/io/config.hpp"
#include "lobsim/io/default_configs.hpp"
#include "lobsim/log.hpp"
#include "lobsim/macro/macro_sim.hpp"
#include "lobsim/micro/micro_sim.hpp"
#include "lobsim/parallel.hpp"
#include "lobsim/validation/cross_scale.hpp"
#include "lobsim/validation/generator.hpp"
#include "lobsim/validation/stats.hpp"
#include "../property_suite.hpp"

using namespace lobsim;
namespace fs = std::filesystem;

namespace {

// Fixed before the checks were first run.
constexpr std::uint64_t kSeed = 20261016;

const fs::path kConfigs = fs::path(LOBSIM_SOURCE_DIR) / "configs";

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

bool close_rel(double got, double want, double tol = 1e-12) {
    return std::abs(got - want) <= tol * std::max(std::abs(want), 1e-300) || got == want;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Field step and price update on hand-computable inputs.
void criterion1(Verdict& v) {
    Rng rng = make_stream(kSeed);
    int checks = 0;

    auto flat = [](double sigma, double f, double alpha) {
        SideCoefficients c;
        c.sigma.base = Profile::constant(sigma);
        c.limit_rate.base = Profile::constant(f);
        c.alpha = alpha;
        return CoefficientSet::symmetric(c);
    };

    {   // fixed point
        macro::MacroModel m;
        m.grid.num_ticks = 4;
        m.coeffs = flat(0, 0, 1);
        macro::SchemeParams p{1.0, 160};
        macro::MacroField f;
        f.book = RealBook(3);
        macro::field_step(f, m, p, rng);
        bool ok = true;
        for (Side s : {Side::bid, Side::ask})
            for (double x : f.book.side(s)) ok = ok && x == 0.0;
        v.require(ok, "zero field is not a fixed point");
        ++checks;
    }
    {   // constant inflow from an empty field: c T / M at every point
        macro::MacroModel m;
        m.grid.num_ticks = 50;
        m.coeffs = flat(0, 0.04, 0.01);
        macro::SchemeParams p{60.0, 1'500'000};
        macro::MacroField f;
        f.book = RealBook(49);
        macro::field_step(f, m, p, rng);
        bool ok = true;
        for (Side s : {Side::bid, Side::ask})
            for (double x : f.book.side(s)) ok = ok && close_rel(x, 0.04 * 60.0 / 1.5e6);
        v.require(ok, "inflow step differs from c T / M");
        ++checks;
    }
    {   // discrete Laplacian with alpha T N^2 / M = 0.1
        macro::MacroModel m;
        m.grid.num_ticks = 4;
        m.coeffs = flat(0, 0, 1);
        macro::SchemeParams p{1.0, 160};
        macro::MacroField f;
        f.book = RealBook({0, 1, 0}, {0, 1, 0});
        macro::field_step(f, m, p, rng);
        const std::vector<double> want{0.1, 0.8, 0.1};
        bool ok = true;
        for (Side s : {Side::bid, Side::ask})
            for (std::size_t i = 0; i < 3; ++i) ok = ok && close_rel(f.book.side(s)[i], want[i]);
        v.require(ok, "Laplacian step differs from [0.1, 0.8, 0.1]");
        ++checks;
    }

    macro::MacroModel pm;
    pm.grid.num_ticks = 50;
    pm.coeffs = flat(0, 0, 0.01);
    pm.price = {2720.0, 12.76, 1.0 / 50};
    const macro::SchemeParams pp{60.0, 1'500'000};
    {   // imbalance 0.01 at the first point
        macro::MacroField f;
        f.book = RealBook(49);
        f.book.bid[0] = 0.03;
        f.book.ask[0] = 0.02;
        const auto pr = macro::jump_probabilities(f, pm, pp);
        v.require(close_rel(pr.up, 5.2128e-4, 1e-12), "pi+ differs from 5.2128e-4");
        v.require(close_rel(pr.down, 12.76 * 4e-5, 1e-12), "pi- differs from delta T / M");
        v.detail << " pi+=" << pr.up;
        ++checks;
    }
    {   // balanced
        macro::MacroField f;
        f.book = RealBook(std::vector<double>(49, 0.7), std::vector<double>(49, 0.7));
        const auto pr = macro::jump_probabilities(f, pm, pp);
        v.require(close_rel(pr.up, 12.76 * 60 / 1.5e6) && close_rel(pr.down, 12.76 * 60 / 1.5e6),
                  "balanced field does not give delta T / M");
        ++checks;
    }
    {   // forced uniform 0: up jump with an empty new best bid
        macro::MacroField f;
        f.book = RealBook(std::vector<double>(49, 0.5), std::vector<double>(49, 0.25), 136.0);
        const auto j = macro::price_update(f, pm, pp, rng, 0.0);
        v.require(j == macro::Jump::up, "Y=0 did not jump up");
        v.require(close_rel(f.book.mid, 136.01, 1e-15), "price did not rise by epsilon");
        v.require(f.book.bid[0] == 0.0 && f.book.bid[1] == 0.5, "bid profile not shifted");
        ++checks;
    }
    v.detail << " " << checks << " of 6 hand examples at relative error <= 1e-12";
}

// Paper-scale macro run.
void criterion2(Verdict& v) {
    const io::RunConfig cfg = io::load_config(kConfigs / "spdr_2012_06_21.ini");
    const auto model = cfg.macro_model();
    macro::MacroField init;
    init.book = cfg.initial_book();
    constexpr int runs = 10;
    std::vector<double> qv(runs), secs(runs);
    std::vector<std::int64_t> jumps(runs);
    parallel_for(runs, [&](std::size_t r) {
        Rng rng = make_stream(cfg.seed, r);
        const auto t0 = std::chrono::steady_clock::now();
        const auto res = macro::simulate_macro(init, model, cfg.scheme, rng);
        secs[r] = seconds_since(t0);
        qv[r] = res.quadratic_variation;
        jumps[r] = res.jumps();
    });
    double mean = 0, slowest = 0;
    bool in_band = true, identity = true;
    for (int r = 0; r < runs; ++r) {
        mean += qv[r] / runs;
        slowest = std::max(slowest, secs[r]);
        in_band = in_band && qv[r] >= 0.15 && qv[r] <= 0.40;
        identity = identity && close_rel(qv[r], 1e-4 * static_cast<double>(jumps[r]), 1e-9);
    }
    v.detail << " run0 QV=" << qv[0] << " $^2 in " << secs[0] << " s; 10-run mean QV=" << mean << " (range "
             << *std::min_element(qv.begin(), qv.end()) << ".." << *std::max_element(qv.begin(), qv.end()) << ")";
    v.require(slowest <= 600.0, "a run took longer than 10 minutes");
    v.require(in_band, "a run's QV is outside [0.15, 0.40]");
    v.require(mean >= 0.20 && mean <= 0.30, "ensemble mean outside [0.20, 0.30]");
    v.require(identity, "QV differs from epsilon^2 times the jump count");

    // 120 delta-hat = 1531.2 in the estimator, with the data's QV of 2417
    // cents^2 split into 885.8 from imbalance and 1531.2 exogenous.
    calibration::CalibrationSettings s;
    const double abs_imb = 885.8 / (60.0 * 2720.0);
    const double imb = 0.5 * abs_imb;
    const auto est = calibration::estimate_price_params(0.0, 2720.0 * 60.0 * imb, 2417.0, imb, abs_imb, s);
    v.require(est.gamma && close_rel(*est.gamma, 2720.0, 1e-12), "gamma-hat is not 2720");
    v.require(close_rel(120.0 * est.delta, 1531.2, 1e-12), "120 delta-hat differs from 1531.2");
    v.detail << "; 120*delta_hat=" << 120.0 * est.delta;
}

// Poisson law of the price-change count with gamma = 0.
void criterion3(Verdict& v) {
    const io::RunConfig cfg = io::load_config(kConfigs / "exogenous_rate.ini");
    const auto model = cfg.macro_model();
    macro::MacroField init;
    init.book = cfg.initial_book();
    macro::MacroOptions o;
    o.regular_snapshots = false;
    const double mean = 2.0 * cfg.price.delta * cfg.scheme.horizon;
    int passed = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(cfg.ensemble));
        parallel_for(counts.size(), [&](std::size_t r) {
            Rng rng = make_stream(seed, r);
            counts[r] = macro::simulate_macro(init, model, cfg.scheme, rng, o).jumps();
        });
        const auto chi = validation::chi_square_poisson(counts, mean);
        passed += chi.p_value > 0.01;
        v.detail << " seed " << seed << ": chi2=" << chi.statistic << " dof " << chi.dof << " p=" << chi.p_value << ";";
    }
    v.detail << " " << passed << " of 3 seeds at 0.01 (runs " << cfg.ensemble << ", mean " << mean << ")";
    v.require(passed >= 2, "fewer than 2 of 3 seeds pass");
}

validation::LadderConfig default_ladder(validation::LadderKind kind) {
    std::istringstream in{std::string(io::default_ladder_config(kind))};
    return io::parse_config(in).ladder;
}

void ladder_line(Verdict& v, const validation::CrossScaleReport& rep) {
    v.detail << " ladder " << rep.seeds_passed << " of " << rep.seeds.size() << " seeds";
    for (const auto& s : rep.seeds) {
        v.detail << " (seed " << s.seed << ":";
        for (const auto& r : s.rungs) v.detail << ' ' << r.mean_statistic;
        v.detail << ", family p " << s.rungs.back().family_p_value << (s.pass ? " ok" : " no") << ")";
    }
}

// Micro to meso: single reflected queue, then the N=4 ladder.
void criterion4(Verdict& v) {
    micro::MicroModel m;
    m.grid.num_ticks = 2;
    m.n = 1e4;
    m.price_dynamics = false;
    SideCoefficients c;
    c.sigma.base = Profile::constant(1.0);
    m.coeffs = CoefficientSet::symmetric(c);
    constexpr std::size_t paths = 5000;
    std::vector<double> z(paths);
    parallel_for(paths, [&](std::size_t p) {
        Rng rng = make_stream(kSeed, p);
        const auto path = micro::simulate_micro(MicroBook(1), m, m.n, rng);
        z[p] = static_cast<double>(path.final_book.bid[0]) / std::sqrt(m.n);
    });
    const auto sum = validation::summarize(z);
    const double target = validation::reflected_bm_moment(1.0, 1.0);
    const double err = std::abs(sum.mean - target);
    v.detail << " E|Z(1)|=" << sum.mean << " vs " << target << ", error " << err << " (SE " << sum.std_error << ");";
    v.require(err < 0.02, "single-queue error not below 0.02");

    const auto rep = validation::cross_scale_report(default_ladder(validation::LadderKind::micro_meso));
    ladder_line(v, rep);
    v.require(rep.pass, "micro ladder report fails");
}

void criterion5(Verdict& v) {
    const auto rep = validation::cross_scale_report(default_ladder(validation::LadderKind::meso_macro));
    ladder_line(v, rep);
    v.require(rep.pass, "meso ladder report fails");
}

// Generator residuals of cos at 1 and x^2 at 0.
void criterion6(Verdict& v) {
    SideCoefficients c;
    c.sigma.base = Profile::constant(1.0);
    const auto coeffs = CoefficientSet::symmetric(c);
    const validation::TestFunction cosine{
        [](std::span<const double> x) { return std::cos(x[0]); },
        [](std::span<const double> x, std::span<double> g) {
            std::fill(g.begin(), g.end(), 0.0);
            g[0] = -std::sin(x[0]);
        },
        [](std::span<const double> x, std::span<double> h) {
            std::fill(h.begin(), h.end(), 0.0);
            h[0] = -std::cos(x[0]);
        }};
    const validation::TestFunction square{
        [](std::span<const double> x) { return x[0] * x[0]; },
        [](std::span<const double> x, std::span<double> g) {
            std::fill(g.begin(), g.end(), 0.0);
            g[0] = 2.0 * x[0];
        },
        [](std::span<const double>, std::span<double> h) {
            std::fill(h.begin(), h.end(), 0.0);
            h[0] = 2.0;
        }};
    constexpr std::size_t paths = 1'000'000;
    struct Case {
        const char* name;
        const validation::TestFunction* f;
        double x;
    };
    for (const Case& k : {Case{"cos at 1", &cosine, 1.0}, Case{"x^2 at 0", &square, 0.0}}) {
        RealBook x({k.x}, {1.0});
        const auto r = validation::generator_residual(coeffs, 2, *k.f, x, 1e-2, 1e4, paths, kSeed);
        const double z = r.residual / r.std_error;
        v.detail << " " << k.name << ": AF=" << r.generator << " residual " << r.residual << " (" << z << " SE);";
        v.require(std::abs(z) <= 3.0, std::string(k.name) + " residual beyond 3 SE");
    }
}

calibration::EstimateSet round_trip(const calibration::SyntheticSpec& spec, const calibration::CalibrationSettings& s,
                                    std::uint64_t seed, std::uint64_t run, bool through_text) {
    Rng rng = make_stream(seed, run);
    calibration::CalibrationAccumulator acc(s);
    const int levels = spec.model.grid.interior();
    std::string line;
    calibration::generate_synthetic(spec, rng, [&](const calibration::LobsterMessage& m, const calibration::BookRow& row) {
        if (!through_text) {
            acc.add(m, row);
            return;
        }
        line.clear();
        calibration::append_book_line(line, row);
        acc.add(calibration::parse_message_line(calibration::format_message_line(m), 1),
                calibration::parse_book_line(line, levels, 1));
    });
    return acc.finish();
}

fs::path find_file(const fs::path& dir, const std::string& marker) {
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().find(marker) != std::string::npos) return e.path();
    return {};
}

// Calibration round trip on synthetic LOBSTER data.
void criterion7(Verdict& v) {
    const io::RunConfig cfg = io::load_config(kConfigs / "synthetic_roundtrip.ini");
    const auto spec = cfg.synthetic_spec();
    const auto& s = cfg.calibration;
    const double gamma = cfg.price.gamma, delta = cfg.price.delta;
    const int runs = cfg.ensemble;
    std::vector<calibration::EstimateSet> est(static_cast<std::size_t>(runs));
    parallel_for(est.size(), [&](std::size_t r) { est[r] = round_trip(spec, s, cfg.seed, r, false); });

    double worst_sigma = 0.0;
    int sigma_levels = 0;
    for (int r = 0; r < runs; ++r) {
        const auto& e = est[static_cast<std::size_t>(r)];
        const double g = e.gamma.value_or(0.0);
        v.detail << " run " << r << ": gamma=" << g << " delta=" << e.delta << ";";
        v.require(std::abs(g - gamma) <= 0.25 * gamma, "run " + std::to_string(r) + " gamma-hat off by more than 25%");
        v.require(std::abs(e.delta - delta) <= 0.25 * delta, "run " + std::to_string(r) + " delta-hat off by more than 25%");
        for (int i = 0; i < s.levels(); ++i) {
            if (e.events[static_cast<std::size_t>(i)] < 1000) continue;
            const double x = static_cast<double>(i + 1) / s.space_levels;
            const double truth = 0.5 * (cfg.coeffs.bid.sigma.value(x, 0) + cfg.coeffs.ask.sigma.value(x, 0));
            const double rel = std::abs(e.sigma[static_cast<std::size_t>(i)] - truth) / truth;
            worst_sigma = std::max(worst_sigma, rel);
            if (r == 0) ++sigma_levels;
        }
    }
    v.detail << " worst sigma error " << 100 * worst_sigma << "% over " << sigma_levels << " levels with >= 1000 events;";
    v.require(sigma_levels > 0, "no level reached 1000 events");
    v.require(worst_sigma <= 0.10, "sigma-hat off by more than 10%");

    // The same run written as LOBSTER text and parsed back.
    const auto text = round_trip(spec, s, cfg.seed, 0, true);
    const bool same = text.to_json() == est[0].to_json();
    v.detail << " text round trip " << (same ? "identical" : "DIFFERS") << ";";
    v.require(same, "estimates from LOBSTER text differ from the in-memory run");

    const char* dir = std::getenv("LOB_SPDR_DIR");
    if (!dir) {
        v.detail << " SPDR fixture not supplied (set LOB_SPDR_DIR)";
        return;
    }
    const fs::path msg = find_file(dir, "message"), book = find_file(dir, "orderbook");
    v.require(!msg.empty() && !book.empty(), "LOB_SPDR_DIR lacks message/orderbook files");
    if (msg.empty() || book.empty()) return;
    const auto data = calibration::parse_lobster(msg, book, calibration::detect_levels(book));
    const auto e = calibration::calibrate(data, calibration::CalibrationSettings{});
    auto sig3 = [](double a, double b) { return std::abs(a - b) <= 0.0005 * std::abs(b) + 1e-12; };
    v.detail << " SPDR: " << data.messages.size() << " events, gamma=" << e.gamma.value_or(0) << " delta=" << e.delta;
    v.require(data.messages.size() == 840549, "SPDR event count is not 840549");
    v.require(e.gamma && sig3(*e.gamma, 2720.0), "SPDR gamma-hat is not 2720 to 3 figures");
    v.require(sig3(e.delta, 12.76), "SPDR delta-hat is not 12.76 to 3 figures");
}

void criterion8(Verdict& v) {
    const auto results = testing::run_property_suite(kSeed, 10'000);
    for (const auto& r : results) {
        v.detail << " " << r.name << " " << r.cases - r.failures << "/" << r.cases << ";";
        v.require(r.pass(), r.name + ": " + r.first_failure);
        v.require(r.cases >= 10'000, r.name + " ran fewer than 10^4 cases");
    }
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

    // Warnings would interleave with the report lines.
    std::vector<std::string> warnings;
    set_warning_sink([&](std::string_view w) { warnings.emplace_back(w); });

    const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
        {"scheme fidelity", criterion1},
        {"macro reproduction at paper scale", criterion2},
        {"exogenous-rate Poisson law", criterion3},
        {"micro to meso convergence", criterion4},
        {"meso to macro convergence", criterion5},
        {"generator residual", criterion6},
        {"calibration round trip", criterion7},
        {"invariant suite", criterion8},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!pick.empty() && !pick.count(id)) continue;
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << " [exception: " << e.what() << "]";
        }
        failed += !v.pass;
        std::printf("%s criterion %d (%s): %.1f s;%s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first,
                    seconds_since(t0), v.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
