#include "lobsim/validation/cross_scale.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lobsim/error.hpp"
#include "lobsim/macro/macro_sim.hpp"
#include "lobsim/meso/meso_sim.hpp"
#include "lobsim/micro/micro_sim.hpp"
#include "lobsim/parallel.hpp"
#include "lobsim/validation/stats.hpp"

namespace lobsim::validation {

namespace {

// samples[time][coordinate][path]
using Samples = std::vector<std::vector<std::vector<double>>>;

Samples make_samples(std::size_t times, std::size_t coords, std::size_t paths) {
    return Samples(times, std::vector<std::vector<double>>(coords, std::vector<double>(paths, 0.0)));
}

RealBook profile_book(const LadderConfig& c, int num_ticks, double scale) {
    RealBook b(num_ticks - 1);
    for (int i = 1; i < num_ticks; ++i) {
        const double x = static_cast<double>(i) / num_ticks;
        b.bid[static_cast<std::size_t>(i - 1)] = scale * c.initial_bid(x);
        b.ask[static_cast<std::size_t>(i - 1)] = scale * c.initial_ask(x);
    }
    return b;
}

double at_position(const std::vector<double>& v, double x) {
    const int N = static_cast<int>(v.size()) + 1;
    const double pos = x * N;
    const int i = std::clamp(static_cast<int>(std::floor(pos + 1e-9)), 0, N - 1);
    const double frac = std::max(0.0, pos - i);
    auto node = [&](int k) { return k <= 0 || k >= N ? 0.0 : v[static_cast<std::size_t>(k - 1)]; };
    return frac < 1e-9 ? node(i) : node(i) + frac * (node(i + 1) - node(i));
}

std::uint64_t stream_id(std::size_t rung, std::size_t path) {
    return (static_cast<std::uint64_t>(rung) << 32) | static_cast<std::uint64_t>(path);
}

meso::MesoModel meso_model(const LadderConfig& c, int num_ticks, meso::CoefficientScaling scaling, bool price) {
    meso::MesoModel m;
    m.grid.num_ticks = num_ticks;
    m.coeffs = c.coeffs;
    m.price = c.price;
    m.regeneration = c.regeneration;
    m.scaling = scaling;
    m.price_dynamics = price;
    return m;
}

// Volumes per level, both sides: coordinates bid1..bidL, ask1..askL.
Samples meso_level_ensemble(const LadderConfig& c, std::uint64_t seed, std::size_t rung_tag) {
    const auto L = static_cast<std::size_t>(c.num_ticks - 1);
    const meso::MesoModel model = meso_model(c, c.num_ticks, meso::CoefficientScaling::plain, c.price_dynamics);
    const meso::MesoState init(profile_book(c, c.num_ticks, 1.0));
    const double horizon = *std::max_element(c.checkpoints.begin(), c.checkpoints.end());
    Samples out = make_samples(c.checkpoints.size(), 2 * L, c.paths);
    meso::MesoOptions opt;
    opt.snapshot_times = c.checkpoints;
    parallel_for(c.paths, [&](std::size_t p) {
        Rng rng = make_stream(seed, stream_id(rung_tag, p));
        const meso::MesoPath path = meso::simulate_meso_dynamic(init, model, horizon, c.meso_dt, rng, opt);
        for (std::size_t k = 0; k < c.checkpoints.size(); ++k)
            for (std::size_t i = 0; i < L; ++i) {
                out[k][i][p] = path.snapshots[k].book.bid[i];
                out[k][L + i][p] = path.snapshots[k].book.ask[i];
            }
    });
    return out;
}

// Returns false when a path hit the event budget.
bool micro_level_ensemble(const LadderConfig& c, double n, std::uint64_t seed, std::size_t rung_tag, Samples& out) {
    const auto L = static_cast<std::size_t>(c.num_ticks - 1);
    micro::MicroModel model;
    model.grid.num_ticks = c.num_ticks;
    model.coeffs = c.coeffs;
    model.price = c.price;
    model.regeneration = c.regeneration;
    model.n = n;
    model.price_dynamics = c.price_dynamics;
    const MicroBook init = micro::initial_from_meso(profile_book(c, c.num_ticks, 1.0), n);
    const double horizon = *std::max_element(c.checkpoints.begin(), c.checkpoints.end());
    micro::MicroOptions opt;
    for (double t : c.checkpoints) opt.snapshot_times.push_back(n * t);
    opt.event_cap = c.event_budget;
    out = make_samples(c.checkpoints.size(), 2 * L, c.paths);
    const double inv = 1.0 / std::sqrt(n);
    std::vector<char> ok(c.paths, 1);
    parallel_for(c.paths, [&](std::size_t p) {
        Rng rng = make_stream(seed, stream_id(rung_tag, p));
        try {
            const micro::MicroPath path = micro::simulate_micro(init, model, n * horizon, rng, opt);
            for (std::size_t k = 0; k < c.checkpoints.size(); ++k)
                for (std::size_t i = 0; i < L; ++i) {
                    out[k][i][p] = path.snapshots[k].book.bid[i] * inv;
                    out[k][L + i][p] = path.snapshots[k].book.ask[i] * inv;
                }
        } catch (const RunawayError&) {
            ok[p] = 0;
        }
    });
    return std::all_of(ok.begin(), ok.end(), [](char v) { return v != 0; });
}

// Values at (side, position): coordinates bid@x1.., ask@x1..
Samples macro_reference(const LadderConfig& c, std::uint64_t seed, std::size_t rung_tag) {
    const std::size_t P = c.positions.size();
    macro::MacroModel model;
    model.grid.num_ticks = c.reference_ticks;
    model.coeffs = c.coeffs;
    model.price_dynamics = false;
    const double horizon = *std::max_element(c.checkpoints.begin(), c.checkpoints.end());
    const double N = c.reference_ticks;
    const double alpha = std::max(c.coeffs.bid.alpha, c.coeffs.ask.alpha);
    macro::SchemeParams scheme;
    scheme.horizon = horizon;
    scheme.steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(2.0 * alpha * horizon * N * N / c.reference_ratio)));
    macro::MacroOptions opt;
    opt.regular_snapshots = false;
    opt.snapshot_times = c.checkpoints;
    macro::MacroField init;
    init.book = profile_book(c, c.reference_ticks, 1.0);
    Samples out = make_samples(c.checkpoints.size(), 2 * P, c.paths);
    parallel_for(c.paths, [&](std::size_t p) {
        Rng rng = make_stream(seed, stream_id(rung_tag, p));
        const macro::MacroResult res = macro::simulate_macro(init, model, scheme, rng, opt);
        for (std::size_t k = 0; k < c.checkpoints.size(); ++k) {
            const auto it = res.snapshots.begin() + static_cast<std::ptrdiff_t>(k);
            for (std::size_t q = 0; q < P; ++q) {
                out[k][q][p] = at_position(it->book.bid, c.positions[q]);
                out[k][P + q][p] = at_position(it->book.ask, c.positions[q]);
            }
        }
    });
    return out;
}

Samples meso_lattice_ensemble(const LadderConfig& c, int N, std::uint64_t seed, std::size_t rung_tag) {
    const std::size_t P = c.positions.size();
    const meso::MesoModel model = meso_model(c, N, meso::CoefficientScaling::lattice, false);
    const double root_n = std::sqrt(static_cast<double>(N));
    const meso::MesoState init(profile_book(c, N, root_n));
    const double n2 = static_cast<double>(N) * N;
    const double horizon = n2 * *std::max_element(c.checkpoints.begin(), c.checkpoints.end());
    meso::MesoOptions opt;
    for (double t : c.checkpoints) opt.snapshot_times.push_back(n2 * t);
    Samples out = make_samples(c.checkpoints.size(), 2 * P, c.paths);
    parallel_for(c.paths, [&](std::size_t p) {
        Rng rng = make_stream(seed, stream_id(rung_tag, p));
        const meso::MesoPath path = meso::simulate_meso_dynamic(init, model, horizon, c.meso_lattice_dt, rng, opt);
        for (std::size_t k = 0; k < c.checkpoints.size(); ++k) {
            const RealBook& b = path.snapshots[k].book;
            std::vector<double> bid(b.bid), ask(b.ask);
            for (double& v : bid) v /= root_n;
            for (double& v : ask) v /= root_n;
            for (std::size_t q = 0; q < P; ++q) {
                out[k][q][p] = at_position(bid, c.positions[q]);
                out[k][P + q][p] = at_position(ask, c.positions[q]);
            }
        }
    });
    return out;
}

std::vector<std::string> coordinate_names(const LadderConfig& c) {
    std::vector<std::string> names;
    if (c.kind == LadderKind::meso_macro) {
        for (const char* side : {"bid", "ask"})
            for (double x : c.positions) {
                std::ostringstream s;
                s << side << "@x=" << x;
                names.push_back(s.str());
            }
    } else {
        for (const char* side : {"bid", "ask"})
            for (int i = 1; i < c.num_ticks; ++i) names.push_back(std::string(side) + std::to_string(i));
    }
    return names;
}

} // namespace

LadderKind parse_ladder_kind(const std::string& name) {
    if (name == "trivial") return LadderKind::trivial;
    if (name == "micro" || name == "micro_meso" || name == "micro-meso") return LadderKind::micro_meso;
    if (name == "meso" || name == "meso_macro" || name == "meso-macro") return LadderKind::meso_macro;
    throw ConfigError("unknown ladder '" + name + "' (expected trivial, micro or meso)");
}

std::string to_string(LadderKind kind) {
    switch (kind) {
    case LadderKind::trivial:
        return "trivial";
    case LadderKind::micro_meso:
        return "micro_meso";
    default:
        return "meso_macro";
    }
}

void LadderConfig::validate() const {
    coeffs.validate();
    if (price_dynamics) price.validate();
    if (checkpoints.empty()) throw ConfigError("ladder: no checkpoint times");
    for (std::size_t k = 0; k < checkpoints.size(); ++k)
        if (!(checkpoints[k] > (k == 0 ? 0.0 : checkpoints[k - 1])))
            throw ConfigError("ladder: checkpoint times must be positive and increasing");
    if (kind != LadderKind::trivial && rungs.empty()) throw ConfigError("ladder: no rungs");
    if (paths < 2) throw ConfigError("ladder: need at least two paths per cell");
    if (paths > 2000) throw ConfigError("ladder: more than 2000 paths per cell exceeds the budget");
    if (num_ticks < 2) throw ConfigError("ladder: num_ticks must be >= 2");
    if (kind == LadderKind::meso_macro) {
        if (positions.empty()) throw ConfigError("ladder: meso_macro needs interior positions");
        for (double x : positions)
            if (!(x > 0.0 && x < 1.0)) throw ConfigError("ladder: positions must lie in (0, 1)");
        if (price_dynamics) throw ConfigError("ladder: meso_macro compares the static models; disable price dynamics");
    }
    if (kind == LadderKind::micro_meso)
        for (double n : rungs)
            if (!(n >= 1.0)) throw ConfigError("ladder: micro rungs must be >= 1");
    if (kind == LadderKind::meso_macro)
        for (double N : rungs)
            if (N < 2.0 || N != std::floor(N)) throw ConfigError("ladder: meso rungs must be integers >= 2");
    if (seeds.empty()) throw ConfigError("ladder: no seeds");
}

CrossScaleReport cross_scale_report(const LadderConfig& c) {
    c.validate();
    CrossScaleReport rep;
    rep.kind = c.kind;
    const std::vector<std::string> names = coordinate_names(c);
    const std::vector<double> rungs = c.kind == LadderKind::trivial ? std::vector<double>{1.0} : c.rungs;
    if (c.kind != LadderKind::trivial) rep.notes.push_back("thresholds are engineering choices; the limit theorems give no rates");

    for (std::uint64_t seed : c.seeds) {
        Samples reference;
        if (c.kind == LadderKind::meso_macro)
            reference = macro_reference(c, seed, 0);
        else
            reference = meso_level_ensemble(c, seed, 0);

        SeedVerdict verdict;
        verdict.seed = seed;
        for (std::size_t r = 0; r < rungs.size(); ++r) {
            Samples sample;
            bool complete = true;
            switch (c.kind) {
            case LadderKind::trivial:
                sample = meso_level_ensemble(c, seed, r + 1);
                break;
            case LadderKind::micro_meso:
                complete = micro_level_ensemble(c, rungs[r], seed, r + 1, sample);
                break;
            case LadderKind::meso_macro:
                sample = meso_lattice_ensemble(c, static_cast<int>(rungs[r]), seed, r + 1);
                break;
            }
            RungSummary rs;
            rs.rung = rungs[r];
            rs.complete = complete;
            if (!complete) {
                rep.incomplete = true;
                rep.notes.push_back("event budget exceeded at rung " + std::to_string(rungs[r]) + ", seed " +
                                    std::to_string(seed));
                verdict.rungs.push_back(rs);
                continue;
            }
            double total = 0.0;
            std::size_t cells = 0;
            for (std::size_t k = 0; k < c.checkpoints.size(); ++k)
                for (std::size_t q = 0; q < names.size(); ++q) {
                    const KsResult ks = ks_distance(sample[k][q], reference[k][q]);
                    rep.cells.push_back({seed, rungs[r], c.checkpoints[k], names[q], ks.statistic, ks.p_value});
                    total += ks.statistic;
                    rs.min_p_value = std::min(rs.min_p_value, ks.p_value);
                    ++cells;
                }
            rs.mean_statistic = total / static_cast<double>(cells);
            rs.family_p_value = std::min(1.0, static_cast<double>(cells) * rs.min_p_value);
            verdict.rungs.push_back(rs);
        }
        const bool all_complete = std::all_of(verdict.rungs.begin(), verdict.rungs.end(), [](const auto& r) { return r.complete; });
        verdict.monotone = all_complete;
        for (std::size_t r = 1; r < verdict.rungs.size(); ++r)
            if (!(verdict.rungs[r].mean_statistic < verdict.rungs[r - 1].mean_statistic)) verdict.monotone = false;
        verdict.terminal_pass = all_complete && verdict.rungs.back().family_p_value > c.significance;
        verdict.pass = verdict.monotone && verdict.terminal_pass;
        if (verdict.pass) ++rep.seeds_passed;
        rep.seeds.push_back(verdict);
    }
    rep.pass = !rep.incomplete && rep.seeds_passed >= std::min<int>(c.seeds_required, static_cast<int>(c.seeds.size()));
    return rep;
}

nlohmann::json CrossScaleReport::to_json() const {
    nlohmann::json j;
    j["ladder"] = to_string(kind);
    j["pass"] = pass;
    j["incomplete"] = incomplete;
    j["seeds_passed"] = seeds_passed;
    j["notes"] = notes;
    for (const auto& s : seeds) {
        nlohmann::json js{{"seed", s.seed}, {"monotone", s.monotone}, {"terminal_pass", s.terminal_pass}, {"pass", s.pass}};
        for (const auto& r : s.rungs)
            js["rungs"].push_back({{"rung", r.rung},
                                   {"mean_ks", r.mean_statistic},
                                   {"min_p", r.min_p_value},
                                   {"family_p", r.family_p_value},
                                   {"complete", r.complete}});
        j["seeds"].push_back(js);
    }
    return j;
}

std::string CrossScaleReport::to_text() const {
    std::ostringstream out;
    out << "ladder " << to_string(kind) << ": " << (pass ? "PASS" : "FAIL") << " (" << seeds_passed << " of "
        << seeds.size() << " seeds" << (incomplete ? ", incomplete" : "") << ")\n";
    out << std::setprecision(4);
    for (const auto& s : seeds) {
        out << "  seed " << s.seed << ":";
        for (const auto& r : s.rungs) out << "  [" << r.rung << "] ks " << r.mean_statistic << " min p " << r.min_p_value << " family p " << r.family_p_value;
        out << (s.monotone ? "  monotone" : "  not monotone") << (s.terminal_pass ? ", terminal ok" : ", terminal fail")
            << '\n';
    }
    for (const auto& n : notes) out << "  note: " << n << '\n';
    return out.str();
}

void CrossScaleReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "seed,rung,time,coordinate,ks,p_value\n" << std::setprecision(10);
    for (const auto& c : cells)
        out << c.seed << ',' << c.rung << ',' << c.time << ',' << c.coordinate << ',' << c.statistic << ',' << c.p_value
            << '\n';
}

} // namespace lobsim::validation
