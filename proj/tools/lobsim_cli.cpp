// Command-line entry point: simulate at each scale, synthesize and calibrate
// LOBSTER data, run the cross-scale ladders.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "lobsim/calibration/estimators.hpp"
#include "lobsim/calibration/lobster.hpp"
#include "lobsim/calibration/synthetic.hpp"
#include "lobsim/error.hpp"
#include "lobsim/io/config.hpp"
#include "lobsim/io/csv.hpp"
#include "lobsim/io/default_configs.hpp"
#include "lobsim/log.hpp"
#include "lobsim/macro/macro_sim.hpp"
#include "lobsim/meso/meso_sim.hpp"
#include "lobsim/micro/micro_sim.hpp"
#include "lobsim/parallel.hpp"
#include "lobsim/simd/stencil.hpp"
#include "lobsim/validation/cross_scale.hpp"

#ifndef LOBSIM_VERSION
#define LOBSIM_VERSION "dev"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lobsim;

namespace {

constexpr int kExitFailedCheck = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Options {
    std::string command;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int ensemble = 0;  // 0 keeps the config value
    std::string ladder;  // empty: take the kind from the config, else trivial
    std::string messages;
    std::string orderbook;
    int levels = 0;
    std::vector<std::string> argv;
};

// Collects what the manifest needs while a command runs.
class Manifest {
public:
    explicit Manifest(const Options& o) : start_(std::chrono::steady_clock::now()) {
        j_["command"] = o.command;
        j_["arguments"] = o.argv;
        j_["versions"] = {{"lobsim", LOBSIM_VERSION},
                          {"boost", BOOST_LIB_VERSION},
                          {"compiler", compiler()},
                          {"stencil_kernel", std::string(simd::to_string(simd::active_isa()))}};
        j_["threads"] = default_threads();
        j_["warnings"] = json::array();
    }

    void config(const std::string& path, const std::string& text) {
        j_["config"] = path;
        j_["config_hash"] = "fnv1a64:" + io::fnv1a_hex(text);
    }
    void seed(std::uint64_t s) { j_["seed"] = s; }
    void set(const std::string& key, json v) { j_[key] = std::move(v); }
    void warning(std::string_view w) {
        std::lock_guard lock(mutex_);
        j_["warnings"].push_back(std::string(w));
    }

    void write(const fs::path& dir, const std::string& status, const std::string& category = {},
               const std::string& message = {}) {
        j_["status"] = status;
        if (!category.empty()) j_["error"] = {{"category", category}, {"message", message}};
        j_["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::vector<std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file() && e.path().filename() != "manifest.json")
                files.push_back(fs::relative(e.path(), dir).generic_string());
        std::sort(files.begin(), files.end());
        j_["outputs"] = files;
        std::ofstream out(dir / "manifest.json");
        out << j_.dump(2) << '\n';
    }

private:
    static std::string compiler() {
#if defined(__clang__)
        return "clang " __clang_version__;
#elif defined(__GNUC__)
        return "gcc " __VERSION__;
#else
        return "unknown";
#endif
    }

    json j_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point start_;
};

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    if (!out) throw DataError("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

io::RunConfig load(const Options& o, Manifest& m) {
    if (o.config.empty()) throw ConfigError("--config is required for " + o.command);
    io::RunConfig c = io::load_config(o.config);
    m.config(o.config, c.source);
    if (o.seed) c.seed = *o.seed;
    if (o.ensemble > 0) c.ensemble = o.ensemble;
    m.seed(c.seed);
    return c;
}

fs::path run_dir(const fs::path& out, int run, int runs) {
    if (runs == 1) return out;
    char name[32];
    std::snprintf(name, sizeof name, "run_%03d", run);
    fs::create_directories(out / name);
    return out / name;
}

int simulate_macro(const Options& o, const fs::path& out, Manifest& m) {
    const io::RunConfig c = load(o, m);
    const macro::MacroModel model = c.macro_model();
    model.validate();
    c.scheme.validate();
    m.set("stability_ratio", macro::stability_ratio(model, c.scheme));
    macro::MacroField init;
    init.book = c.initial_book();
    const auto runs = static_cast<std::size_t>(c.ensemble);
    std::vector<double> qv(runs);
    std::vector<std::int64_t> jumps(runs);
    parallel_for(runs, [&](std::size_t r) {
        Rng rng = make_stream(c.seed, r);
        const macro::MacroResult res = macro::simulate_macro(init, model, c.scheme, rng);
        const fs::path dir = run_dir(out, static_cast<int>(r), c.ensemble);
        std::vector<double> t, p;
        for (const auto& pt : res.price_path) {
            t.push_back(pt.time);
            p.push_back(pt.price);
        }
        io::write_price_series(dir / "price.csv", t, p, "model time units");
        io::write_snapshots(dir / "snapshots.csv", res.snapshots, model.grid.interior(), "model time units",
                            "model volume units");
        io::write_profile(dir / "average_profile.csv", model.grid, res.average_profile,
                          "time-averaged volume in model units");
        json s{{"quadratic_variation", res.quadratic_variation},
               {"up_jumps", res.up_jumps},
               {"down_jumps", res.down_jumps},
               {"max_clip", res.max_clip},
               {"total_clip", res.total_clip}};
        write_json(dir / "summary.json", s);
        qv[r] = res.quadratic_variation;
        jumps[r] = res.jumps();
    });
    double mean = 0.0;
    for (double v : qv) mean += v / static_cast<double>(runs);
    for (std::size_t r = 0; r < runs; ++r)
        std::cout << "run " << r << ": QV " << qv[r] << " currency^2, " << jumps[r] << " price changes\n";
    if (runs > 1) std::cout << "ensemble mean QV " << mean << " currency^2 over " << runs << " runs\n";
    m.set("quadratic_variation", {{"per_run", qv}, {"mean", mean}});
    return 0;
}

int simulate_meso(const Options& o, const fs::path& out, Manifest& m) {
    const io::RunConfig c = load(o, m);
    const meso::MesoModel model = c.meso_model();
    const double dt = c.meso.dt > 0.0 ? c.meso.dt : meso::default_meso_dt(c.meso.horizon);
    m.set("dt", dt);
    const meso::MesoState init(c.initial_book());
    meso::MesoOptions opt;
    opt.snapshot_times = c.meso.snapshots;
    const auto runs = static_cast<std::size_t>(c.ensemble);
    parallel_for(runs, [&](std::size_t r) {
        Rng rng = make_stream(c.seed, r);
        const meso::MesoPath path = meso::simulate_meso_dynamic(init, model, c.meso.horizon, dt, rng, opt);
        const fs::path dir = run_dir(out, static_cast<int>(r), c.ensemble);
        io::write_snapshots(dir / "snapshots.csv", path.snapshots, model.grid.interior(), "meso time units",
                            "meso volume units");
        io::write_price_events(dir / "price_events.csv", path.price_events, "meso time units");
        const RealBook ledger(path.final_state.ledger_bid, path.final_state.ledger_ask);
        io::write_profile(dir / "ledger.csv", model.grid, ledger, "cumulative reflection push in meso volume units");
        std::vector<meso::MesoSnapshot> last{{c.meso.horizon, path.final_state.book}};
        io::write_snapshots(dir / "final.csv", last, model.grid.interior(), "meso time units", "meso volume units");
    });
    std::cout << "simulated " << runs << " meso path(s) to t=" << c.meso.horizon << " with dt=" << dt << '\n';
    return 0;
}

int simulate_micro(const Options& o, const fs::path& out, Manifest& m) {
    const io::RunConfig c = load(o, m);
    const micro::MicroModel model = c.micro_model();
    model.validate();
    const MicroBook init = micro::initial_from_meso(c.initial_book(), model.n);
    micro::MicroOptions opt;
    for (double t : c.micro.snapshots) opt.snapshot_times.push_back(model.n * t);
    opt.event_cap = c.micro.event_cap;
    opt.record_events = true;
    const auto runs = static_cast<std::size_t>(c.ensemble);
    std::vector<std::uint64_t> events(runs);
    parallel_for(runs, [&](std::size_t r) {
        Rng rng = make_stream(c.seed, r);
        const micro::MicroPath raw = micro::simulate_micro(init, model, model.n * c.micro.horizon, rng, opt);
        const micro::MicroPath path = micro::rescale_path(raw, model.n);
        const fs::path dir = run_dir(out, static_cast<int>(r), c.ensemble);
        io::write_events(dir / "events.csv", path.events, "rescaled time (micro time / n)");
        io::write_snapshots(dir / "snapshots.csv", path.snapshots, model.grid.interior(), "rescaled time (micro time / n)",
                            "rescaled volume (shares / sqrt n)");
        io::write_price_events(dir / "price_events.csv", path.price_events, "rescaled time (micro time / n)");
        json s{{"events", raw.event_count}, {"frozen", raw.frozen}, {"final_time", path.final_time}};
        write_json(dir / "summary.json", s);
        events[r] = raw.event_count;
    });
    for (std::size_t r = 0; r < runs; ++r) std::cout << "run " << r << ": " << events[r] << " events\n";
    return 0;
}

int synthesize(const Options& o, const fs::path& out, Manifest& m) {
    const io::RunConfig c = load(o, m);
    const calibration::SyntheticSpec spec = c.synthetic_spec();
    Rng rng = make_stream(c.seed, 0);
    const calibration::SyntheticSummary s = calibration::write_synthetic(spec, rng, out, "synthetic");
    const json j{{"rows", s.rows},
                 {"up_jumps", s.up_jumps},
                 {"down_jumps", s.down_jumps},
                 {"mean_imbalance", s.mean_imbalance},
                 {"mean_abs_imbalance", s.mean_abs_imbalance},
                 {"planted", {{"gamma", c.price.gamma}, {"delta", c.price.delta}}}};
    write_json(out / "synthetic_summary.json", j);
    std::cout << "wrote " << s.rows << " rows, " << s.up_jumps + s.down_jumps << " price changes\n";
    return 0;
}

int calibrate_cmd(const Options& o, const fs::path& out, Manifest& m) {
    calibration::CalibrationSettings settings;
    if (!o.config.empty()) {
        const io::RunConfig c = load(o, m);
        settings = c.calibration;
    }
    if (o.messages.empty() || o.orderbook.empty()) throw ConfigError("calibrate needs --messages and --orderbook");
    const int levels = o.levels > 0 ? o.levels : calibration::detect_levels(o.orderbook);
    std::ifstream msgs(o.messages), book(o.orderbook);
    if (!msgs) throw DataError("cannot open " + o.messages);
    if (!book) throw DataError("cannot open " + o.orderbook);
    const calibration::EstimateSet e = calibration::calibrate(msgs, book, levels, settings);
    calibration::write_estimates(e, out / "estimates.json", out / "estimates.csv");
    for (const auto& w : e.warnings) m.warning(w);
    std::cout << "rows " << e.rows << "\n";
    if (e.gamma) std::cout << "gamma " << *e.gamma << '\n';
    else std::cout << "gamma not estimable (zero average imbalance)\n";
    std::cout << "delta " << e.delta << '\n';
    return 0;
}

int validate_cmd(const Options& o, const fs::path& out, Manifest& m) {
    io::RunConfig c;
    if (!o.config.empty()) {
        c = load(o, m);
        if (!c.has_ladder) throw ConfigError("config has no [ladder] section");
    } else {
        const std::string name = o.ladder.empty() ? "trivial" : o.ladder;
        const std::string text(io::default_ladder_config(validation::parse_ladder_kind(name)));
        std::istringstream in(text);
        c = io::parse_config(in);
        m.config("builtin:ladder_" + name, text);
        if (o.seed) c.seed = *o.seed;
        m.seed(c.seed);
    }
    if (!o.ladder.empty() && c.ladder.kind != validation::parse_ladder_kind(o.ladder))
        throw ConfigError("--ladder " + o.ladder + " does not match the config's ladder kind " +
                          validation::to_string(c.ladder.kind));
    if (o.seed) c.ladder.seeds = {*o.seed, *o.seed + 1, *o.seed + 2};
    m.set("seeds", c.ladder.seeds);
    const validation::CrossScaleReport rep = validation::cross_scale_report(c.ladder);
    {
        std::ofstream txt(out / "report.txt");
        txt << rep.to_text();
    }
    write_json(out / "report.json", rep.to_json());
    rep.write_csv(out / "cells.csv");
    std::cout << rep.to_text();
    m.set("pass", rep.pass);
    if (rep.incomplete) throw RunawayError("ladder incomplete: event budget exceeded");
    return rep.pass ? 0 : kExitFailedCheck;
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    o.argv.assign(argv, argv + argc);
    CLI::App app{"Limit order book simulation across micro, meso and macro scales"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub, bool config_required) {
        auto* cfg = sub->add_option("--config", o.config, "INI model configuration");
        if (config_required) cfg->required();
        sub->add_option("--out", o.out, "output directory (created if absent)")->required();
        sub->add_option("--seed", seed, "overrides [run] seed");
        return sub;
    };
    for (const char* name : {"simulate-micro", "simulate-meso", "simulate-macro"})
        common(app.add_subcommand(name, std::string("run the ") + (name + 9) + " model"), true)
            ->add_option("--ensemble", o.ensemble, "number of independent runs (stream = run index)");
    common(app.add_subcommand("synthesize", "write macro-simulated LOBSTER files"), true);
    auto* cal = common(app.add_subcommand("calibrate", "estimate model parameters from LOBSTER files"), false);
    cal->add_option("--messages", o.messages, "LOBSTER message file")->required();
    cal->add_option("--orderbook", o.orderbook, "LOBSTER orderbook file")->required();
    cal->add_option("--levels", o.levels, "book levels (detected when omitted)");
    auto* val = common(app.add_subcommand("validate", "run a cross-scale ladder"), false);
    val->add_option("--ladder", o.ladder, "trivial, micro or meso")->check(CLI::IsMember({"trivial", "micro", "meso"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    o.command = app.get_subcommands().front()->get_name();
    if (app.get_subcommands().front()->count("--seed")) o.seed = seed;

    const fs::path out(o.out);
    try {
        fs::create_directories(out);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: cannot create output directory: " << e.what() << '\n';
        return kExitData;
    }
    Manifest manifest(o);
    set_warning_sink([&](std::string_view w) {
        std::cerr << "warning: " << w << '\n';
        manifest.warning(w);
    });

    auto fail = [&](const char* category, const std::exception& e, int code) {
        std::cerr << category << " error: " << e.what() << '\n';
        manifest.write(out, "error", category, e.what());
        return code;
    };
    try {
        int code = 0;
        if (o.command == "simulate-macro") code = simulate_macro(o, out, manifest);
        else if (o.command == "simulate-meso") code = simulate_meso(o, out, manifest);
        else if (o.command == "simulate-micro") code = simulate_micro(o, out, manifest);
        else if (o.command == "synthesize") code = synthesize(o, out, manifest);
        else if (o.command == "calibrate") code = calibrate_cmd(o, out, manifest);
        else code = validate_cmd(o, out, manifest);
        manifest.write(out, code == 0 ? "ok" : "check failed");
        return code;
    } catch (const ConfigError& e) {
        return fail("config", e, kExitConfig);
    } catch (const DataError& e) {
        return fail("data", e, kExitData);
    } catch (const NumericalError& e) {
        return fail("numerical", e, kExitNumerical);
    } catch (const std::exception& e) {
        return fail("internal", e, kExitFailedCheck);
    }
}
