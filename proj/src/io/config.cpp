#include "lobsim/io/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lobsim/error.hpp"

namespace lobsim::io {

namespace {

namespace pt = boost::property_tree;

// Allowed keys per section.
const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"run", {"seed", "ensemble"}},
        {"grid", {"num_ticks", "tick_size", "jump_size"}},
        {"coefficients", {"sigma", "sigma_slope", "f", "f_slope", "g", "g_slope", "alpha"}},
        {"coefficients-bid", {"sigma", "sigma_slope", "f", "f_slope", "g", "g_slope", "alpha"}},
        {"coefficients-ask", {"sigma", "sigma_slope", "f", "f_slope", "g", "g_slope", "alpha"}},
        {"price-change", {"gamma", "delta", "window", "allow_zero_delta", "dynamics"}},
        {"regeneration", {"kind", "bins"}},
        {"scheme", {"horizon", "steps", "allow_unstable", "snapshot_every"}},
        {"micro", {"n", "horizon", "event_cap", "snapshots"}},
        {"meso", {"horizon", "dt", "scaling", "snapshots"}},
        {"initial", {"bid", "ask", "both", "mid"}},
        {"calibration", {"volume_unit", "space_levels", "session_minutes", "alpha", "tick", "averaging", "exclude_unoccupied"}},
        {"synthetic", {"volume_unit", "flush_fraction", "max_age_steps", "tick", "start_mid_ticks", "start_seconds"}},
        {"ladder", {"kind", "num_ticks", "rungs", "checkpoints", "positions", "paths", "meso_dt", "meso_lattice_dt",
                    "reference_ticks", "reference_ratio", "seeds", "significance", "seeds_required", "event_budget"}},
    };
    return s;
}

class Section {
public:
    Section(std::string name, const pt::ptree* tree, std::filesystem::path base)
        : name_(std::move(name)), tree_(tree), base_(std::move(base)) {}

    bool present() const { return tree_ != nullptr; }
    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::string text(const std::string& key) const {
        std::string v = tree_->get<std::string>(key);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\r')) v.pop_back();
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        return v;
    }

    template <class T>
    void get(const std::string& key, T& out) const {
        if (!has(key)) return;
        out = number<T>(key, text(key));
    }

    void get(const std::string& key, bool& out) const {
        if (!has(key)) return;
        const std::string v = text(key);
        if (v == "true" || v == "1" || v == "yes") out = true;
        else if (v == "false" || v == "0" || v == "no") out = false;
        else fail(key, "expected a boolean, got '" + v + "'");
    }

    void get(const std::string& key, Profile& out) const {
        if (!has(key)) return;
        std::string v = text(key);
        // Relative CSV paths resolve against the config file's directory.
        if (v.rfind("csv:", 0) == 0 && !base_.empty()) {
            const std::filesystem::path p(v.substr(4));
            if (p.is_relative()) v = "csv:" + (base_ / p).string();
        }
        out = Profile::parse(v);
    }

    template <class T>
    void get(const std::string& key, std::vector<T>& out) const {
        if (!has(key)) return;
        out.clear();
        std::string v = text(key);
        for (char& c : v)
            if (c == ',') c = ' ';
        std::istringstream ss(v);
        std::string tok;
        while (ss >> tok) out.push_back(number<T>(key, tok));
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError("[" + name_ + "] " + key + ": " + what);
    }

private:
    template <class T>
    T number(const std::string& key, const std::string& v) const {
        T out{};
        if constexpr (std::is_floating_point_v<T>) {
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
            if (ec != std::errc{} || p != v.data() + v.size()) fail(key, "expected a number, got '" + v + "'");
        } else {
            // Integers also accept "1e6" style.
            double d = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
            if (ec != std::errc{} || p != v.data() + v.size() || d != static_cast<double>(static_cast<T>(d)))
                fail(key, "expected an integer, got '" + v + "'");
            out = static_cast<T>(d);
        }
        return out;
    }

    std::string name_;
    const pt::ptree* tree_;
    std::filesystem::path base_;
};

void read_side(const Section& sec, SideCoefficients& c) {
    if (!sec.present()) return;
    sec.get("sigma", c.sigma.base);
    sec.get("sigma_slope", c.sigma.slope);
    sec.get("f", c.limit_rate.base);
    sec.get("f_slope", c.limit_rate.slope);
    sec.get("g", c.cancel_rate.base);
    sec.get("g_slope", c.cancel_rate.slope);
    sec.get("alpha", c.alpha);
}

} // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    std::string source((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    pt::ptree tree;
    try {
        std::istringstream ss(source);
        pt::read_ini(ss, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& [name, body] : tree) {
        const auto it = schema().find(name);
        if (it == schema().end()) {
            if (body.empty()) throw ConfigError("config: key '" + name + "' outside any section");
            throw ConfigError("config: unknown section [" + name + "]");
        }
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
    }
    auto section = [&](const std::string& name) {
        const auto it = tree.find(name);
        return Section(name, it == tree.not_found() ? nullptr : &it->second, base_dir);
    };

    RunConfig c;
    c.source = source;
    const Section run = section("run");
    run.get("seed", c.seed);
    run.get("ensemble", c.ensemble);
    if (c.ensemble < 1) run.fail("ensemble", "must be >= 1");

    const Section grid = section("grid");
    grid.get("num_ticks", c.grid.num_ticks);
    grid.get("tick_size", c.grid.tick_size);
    grid.get("jump_size", c.grid.jump_size);
    c.grid.validate();

    // [coefficients] sets both sides; the per-side sections override it.
    SideCoefficients common;
    read_side(section("coefficients"), common);
    c.coeffs.bid = common;
    c.coeffs.ask = common;
    read_side(section("coefficients-bid"), c.coeffs.bid);
    read_side(section("coefficients-ask"), c.coeffs.ask);

    const Section price = section("price-change");
    price.get("gamma", c.price.gamma);
    price.get("delta", c.price.delta);
    price.get("window", c.price.window);
    price.get("allow_zero_delta", c.price.allow_zero_delta);
    price.get("dynamics", c.price_dynamics);

    const Section regen = section("regeneration");
    if (regen.has("kind")) {
        const std::string kind = regen.text("kind");
        if (kind == "shift") c.regeneration = RegenerationRule::shift(1);
        else if (kind == "identity") c.regeneration = RegenerationRule::identity();
        else regen.fail("kind", "expected shift or identity, got '" + kind + "'");
    }
    if (regen.has("bins")) {
        if (c.regeneration.kind != RegenerationRule::Kind::shift) regen.fail("bins", "only applies to kind = shift");
        regen.get("bins", c.regeneration.bins);
        if (c.regeneration.bins < 1) regen.fail("bins", "must be >= 1");
    }

    const Section scheme = section("scheme");
    scheme.get("horizon", c.scheme.horizon);
    scheme.get("steps", c.scheme.steps);
    scheme.get("allow_unstable", c.scheme.allow_unstable);
    scheme.get("snapshot_every", c.scheme.snapshot_every);

    const Section micro = section("micro");
    micro.get("n", c.micro.n);
    micro.get("horizon", c.micro.horizon);
    micro.get("event_cap", c.micro.event_cap);
    micro.get("snapshots", c.micro.snapshots);

    const Section meso = section("meso");
    meso.get("horizon", c.meso.horizon);
    meso.get("dt", c.meso.dt);
    meso.get("snapshots", c.meso.snapshots);
    if (meso.has("scaling")) {
        const std::string v = meso.text("scaling");
        if (v == "plain") c.meso.scaling = meso::CoefficientScaling::plain;
        else if (v == "lattice") c.meso.scaling = meso::CoefficientScaling::lattice;
        else meso.fail("scaling", "expected plain or lattice, got '" + v + "'");
    }

    const Section initial = section("initial");
    initial.get("both", c.initial_bid);
    initial.get("both", c.initial_ask);
    initial.get("bid", c.initial_bid);
    initial.get("ask", c.initial_ask);
    initial.get("mid", c.initial_mid);

    const Section cal = section("calibration");
    cal.get("volume_unit", c.calibration.volume_unit);
    cal.get("space_levels", c.calibration.space_levels);
    cal.get("session_minutes", c.calibration.session_minutes);
    cal.get("alpha", c.calibration.alpha);
    cal.get("tick", c.calibration.tick);
    cal.get("exclude_unoccupied", c.calibration.exclude_unoccupied);
    if (cal.has("averaging")) {
        const std::string v = cal.text("averaging");
        if (v == "time_weighted") c.calibration.averaging = calibration::ImbalanceAveraging::time_weighted;
        else if (v == "per_row") c.calibration.averaging = calibration::ImbalanceAveraging::per_row;
        else cal.fail("averaging", "expected time_weighted or per_row, got '" + v + "'");
    }

    const Section syn = section("synthetic");
    syn.get("volume_unit", c.synthetic.volume_unit);
    syn.get("flush_fraction", c.synthetic.flush_fraction);
    syn.get("max_age_steps", c.synthetic.max_age_steps);
    syn.get("tick", c.synthetic.tick);
    syn.get("start_mid_ticks", c.synthetic.start_mid_ticks);
    syn.get("start_seconds", c.synthetic.start_seconds);

    const Section lad = section("ladder");
    if (lad.present()) {
        c.has_ladder = true;
        auto& L = c.ladder;
        if (lad.has("kind")) {
            try {
                L.kind = validation::parse_ladder_kind(lad.text("kind"));
            } catch (const ConfigError& e) {
                lad.fail("kind", e.what());
            }
        }
        lad.get("num_ticks", L.num_ticks);
        lad.get("rungs", L.rungs);
        lad.get("checkpoints", L.checkpoints);
        lad.get("positions", L.positions);
        lad.get("paths", L.paths);
        lad.get("meso_dt", L.meso_dt);
        lad.get("meso_lattice_dt", L.meso_lattice_dt);
        lad.get("reference_ticks", L.reference_ticks);
        lad.get("reference_ratio", L.reference_ratio);
        lad.get("seeds", L.seeds);
        lad.get("significance", L.significance);
        lad.get("seeds_required", L.seeds_required);
        lad.get("event_budget", L.event_budget);
        L.coeffs = c.coeffs;
        L.price = c.price;
        L.price_dynamics = c.price_dynamics;
        L.regeneration = c.regeneration;
        L.initial_bid = c.initial_bid;
        L.initial_ask = c.initial_ask;
        L.validate();
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    return parse_config(in, path.parent_path());
}

macro::MacroModel RunConfig::macro_model() const {
    macro::MacroModel m;
    m.grid = grid;
    m.coeffs = coeffs;
    m.price = price;
    m.regeneration = regeneration;
    m.price_dynamics = price_dynamics;
    return m;
}

meso::MesoModel RunConfig::meso_model() const {
    meso::MesoModel m;
    m.grid = grid;
    m.coeffs = coeffs;
    m.price = price;
    m.regeneration = regeneration;
    m.scaling = meso.scaling;
    m.price_dynamics = price_dynamics;
    return m;
}

micro::MicroModel RunConfig::micro_model() const {
    micro::MicroModel m;
    m.grid = grid;
    m.coeffs = coeffs;
    m.price = price;
    m.regeneration = regeneration;
    m.n = micro.n;
    m.price_dynamics = price_dynamics;
    return m;
}

calibration::SyntheticSpec RunConfig::synthetic_spec() const {
    calibration::SyntheticSpec s;
    s.model = macro_model();
    s.scheme = scheme;
    s.initial = initial_book();
    s.volume_unit = synthetic.volume_unit;
    s.flush_fraction = synthetic.flush_fraction;
    s.max_age_steps = synthetic.max_age_steps;
    s.tick = synthetic.tick;
    s.start_mid_ticks = synthetic.start_mid_ticks;
    s.start_seconds = synthetic.start_seconds;
    return s;
}

RealBook RunConfig::initial_book() const {
    RealBook b(grid.interior());
    b.mid = initial_mid;
    for (int i = 1; i < grid.num_ticks; ++i) {
        const double x = grid.position(i);
        b.bid[static_cast<std::size_t>(i - 1)] = initial_bid(x);
        b.ask[static_cast<std::size_t>(i - 1)] = initial_ask(x);
    }
    for (Side s : {Side::bid, Side::ask})
        for (double v : b.side(s))
            if (!(v >= 0.0)) throw ConfigError("[initial] profiles must be nonnegative");
    return b;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace lobsim::io
