#include "lobsim/meso/meso_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lobsim/error.hpp"
#include "lobsim/log.hpp"

namespace lobsim::meso {

void MesoModel::validate() const {
    grid.validate();
    coeffs.validate(true);
    if (price_dynamics) price.validate();
}

StencilScaling MesoModel::stencil_scaling(double dt) const {
    StencilScaling s;
    s.drift_factor = dt;
    s.noise_factor = std::sqrt(dt);
    s.diffusion_factor = dt;
    if (scaling == CoefficientScaling::lattice) {
        const double N = grid.num_ticks;
        s.drift_factor = dt * std::pow(N, -1.5);
        s.volume_scale = 1.0 / std::sqrt(N);
    }
    return s;
}

MesoState::MesoState(RealBook b)
    : book(std::move(b)), ledger_bid(book.bid.size(), 0.0), ledger_ask(book.ask.size(), 0.0) {}

MesoStepper::MesoStepper(const MesoModel& model) : model_(&model) {
    const auto levels = static_cast<std::size_t>(model.grid.interior());
    z_.resize(levels);
    out_.resize(levels);
    push_bid_.resize(levels);
    push_ask_.resize(levels);
}

void MesoStepper::ensure_tables(double dt, double mid) {
    if (dt == table_dt_ && (!model_->coeffs.mid_hook || mid == table_mid_)) return;
    const StencilScaling sc = model_->stencil_scaling(dt);
    bid_tables_ = build_stencil_tables(model_->coeffs, Side::bid, model_->grid.num_ticks, mid, sc);
    ask_tables_ = build_stencil_tables(model_->coeffs, Side::ask, model_->grid.num_ticks, mid, sc);
    if (table_dt_ != dt) {
        double worst = 0.0;
        for (const auto* t : {&bid_tables_, &ask_tables_}) {
            double slope = 0.0;
            for (double v : t->drift_slope) slope = std::max(slope, std::abs(v));
            worst = std::max(worst, 2.0 * t->diffusion + slope);
        }
        if (worst >= 1.0) {
            std::ostringstream msg;
            msg << "meso: dt * (2 alpha + |h slope|) = " << worst << " >= 1; the explicit step may be unstable";
            warn(msg.str());
        }
    }
    table_dt_ = dt;
    table_mid_ = mid;
}

void MesoStepper::step(MesoState& state, double dt, Rng& rng) {
    if (!(dt > 0.0)) throw ConfigError("meso: dt must be positive");
    const std::size_t levels = z_.size();
    if (state.book.bid.size() != levels || state.book.ask.size() != levels)
        throw ConfigError("meso: state has " + std::to_string(state.book.bid.size()) + " levels, grid expects " +
                          std::to_string(levels));
    if (state.ledger_bid.size() != levels) state.ledger_bid.assign(levels, 0.0);
    if (state.ledger_ask.size() != levels) state.ledger_ask.assign(levels, 0.0);
    ensure_tables(dt, state.book.mid);

    for (Side s : {Side::bid, Side::ask}) {
        for (double& z : z_) z = draw_normal(rng);
        auto& u = state.book.side(s);
        auto& push = s == Side::bid ? push_bid_ : push_ask_;
        const auto& tables = s == Side::bid ? bid_tables_ : ask_tables_;
        if (!simd::reflected_step(u, z_, tables, out_, push))
            throw NumericalError(std::string("meso: non-finite value in the ") + std::string(to_string(s)) +
                                 " profile at mid " + std::to_string(state.book.mid));
        u.swap(out_);
        auto& ledger = state.ledger(s);
        for (std::size_t i = 0; i < levels; ++i) ledger[i] += push[i];
    }
}

void step_meso(MesoState& state, const MesoModel& model, double dt, Rng& rng) {
    MesoStepper stepper(model);
    stepper.step(state, dt, rng);
}

MesoPath simulate_meso_dynamic(const MesoState& init, const MesoModel& model, double horizon, double dt, Rng& rng,
                               const MesoOptions& options) {
    model.validate();
    if (!(horizon >= 0.0)) throw ConfigError("meso: horizon must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("meso: dt must be positive");

    MesoPath path;
    path.final_state = init;
    MesoState& state = path.final_state;
    if (state.ledger_bid.size() != state.book.bid.size()) state.ledger_bid.assign(state.book.bid.size(), 0.0);
    if (state.ledger_ask.size() != state.book.ask.size()) state.ledger_ask.assign(state.book.ask.size(), 0.0);

    const std::int64_t steps = horizon == 0.0 ? 0 : std::max<std::int64_t>(1, std::llround(horizon / dt));
    const double h = steps > 0 ? horizon / static_cast<double>(steps) : dt;
    path.steps = steps;
    path.dt = h;

    std::vector<std::pair<std::int64_t, double>> snaps;
    for (double t : options.snapshot_times) {
        if (t < 0.0 || t > horizon) continue;
        snaps.emplace_back(steps > 0 ? std::llround(t / h) : 0, t);
    }
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    auto record = [&](std::int64_t j) {
        while (next_snap < snaps.size() && snaps[next_snap].first <= j) {
            path.snapshots.push_back({static_cast<double>(j) * h, state.book});
            ++next_snap;
        }
    };

    PriceClock clock = options.clock ? *options.clock : PriceClock{};
    if (model.price_dynamics && !options.clock) clock.reset(rng);
    const int N = model.grid.num_ticks;
    MesoStepper stepper(model);

    record(0);
    for (std::int64_t j = 0; j < steps; ++j) {
        if (model.price_dynamics) {
            const ThetaRates th = theta_rates(state.book.bid, state.book.ask, N, model.price);
            const double need_up = clock.threshold_up - clock.acc_up;
            const double need_down = clock.threshold_down - clock.acc_down;
            clock.acc_up += th.up * h;
            clock.acc_down += th.down * h;
            const bool up = clock.acc_up >= clock.threshold_up;
            const bool down = clock.acc_down >= clock.threshold_down;
            if (up || down) {
                Direction d = up ? Direction::up : Direction::down;
                double frac = 0.0;
                const double frac_up = th.up > 0.0 ? std::max(0.0, need_up) / (th.up * h) : 1.0;
                const double frac_down = th.down > 0.0 ? std::max(0.0, need_down) / (th.down * h) : 1.0;
                if (up && down) d = frac_down < frac_up ? Direction::down : Direction::up;
                frac = d == Direction::up ? frac_up : frac_down;
                PriceEvent ev;
                ev.time = (static_cast<double>(j) + std::min(frac, 1.0)) * h;
                ev.direction = d;
                ev.bid = state.book.bid;
                ev.ask = state.book.ask;
                regenerate(state.book.bid, state.book.ask, d, model.regeneration, rng);
                state.book.mid += d == Direction::up ? model.grid.jump_size : -model.grid.jump_size;
                ev.new_mid = state.book.mid;
                path.price_events.push_back(std::move(ev));
                clock.reset(rng);
            }
        }
        stepper.step(state, h, rng);
        record(j + 1);
    }
    return path;
}

} // namespace lobsim::meso
