#include "lobsim/macro/macro_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lobsim/core/stencil_tables.hpp"
#include "lobsim/error.hpp"
#include "lobsim/log.hpp"

namespace lobsim::macro {

void MacroModel::validate() const {
    grid.validate();
    coeffs.validate(true);
    if (price_dynamics) price.validate();
}

void SchemeParams::validate() const {
    if (!(horizon > 0.0)) throw ConfigError("scheme: horizon must be positive");
    if (steps < 1) throw ConfigError("scheme: steps must be >= 1");
    if (snapshot_every < 0) throw ConfigError("scheme: snapshot_every must be >= 0");
}

double stability_ratio(const MacroModel& model, const SchemeParams& params) {
    const double N = model.grid.num_ticks;
    const double alpha = std::max(model.coeffs.bid.alpha, model.coeffs.ask.alpha);
    return 2.0 * alpha * params.horizon * N * N / static_cast<double>(params.steps);
}

JumpProbabilities jump_probabilities(const MacroField& field, const MacroModel& model, const SchemeParams& params) {
    if (!model.price_dynamics) return {};
    const ThetaRates th = theta_rates(field.book.bid, field.book.ask, model.grid.num_ticks, model.price);
    const double dt = params.dt();
    return {th.up * dt, th.down * dt};
}

Jump price_update(MacroField& field, const MacroModel& model, const SchemeParams& params, Rng& rng,
                  std::optional<double> forced_uniform) {
    if (!model.price_dynamics) return Jump::none;
    const JumpProbabilities p = jump_probabilities(field, model, params);
    if (p.up + p.down > 1.0) {
        std::ostringstream msg;
        msg << "macro: jump probabilities sum to " << p.up + p.down << " at step " << field.step
            << "; the time step is too coarse";
        throw NumericalError(msg.str());
    }
    const double y = forced_uniform ? *forced_uniform : draw_uniform(rng);
    Jump j = Jump::none;
    if (y < p.up)
        j = Jump::up;
    else if (y < p.up + p.down)
        j = Jump::down;
    if (j == Jump::none) return j;
    const Direction d = j == Jump::up ? Direction::up : Direction::down;
    regenerate(field.book.bid, field.book.ask, d, model.regeneration, rng);
    field.book.mid += j == Jump::up ? model.grid.jump_size : -model.grid.jump_size;
    return j;
}

MacroStepper::MacroStepper(const MacroModel& model, const SchemeParams& params) : model_(&model), params_(params) {
    params.validate();
    const double ratio = stability_ratio(model, params);
    if (ratio > 1.0) {
        std::ostringstream msg;
        msg << "macro: stability ratio 2 alpha T N^2 / M = " << ratio << " exceeds 1";
        if (!params.allow_unstable) throw ConfigError(msg.str() + " (set allow_unstable to override)");
        warn(msg.str());
    }
    const auto levels = static_cast<std::size_t>(model.grid.interior());
    z_bid_.resize(levels);
    z_ask_.resize(levels);
    clip_bid_.resize(levels);
    clip_ask_.resize(levels);
    out_.resize(levels);
}

void MacroStepper::ensure_tables(double mid) {
    if (built_ && (!model_->coeffs.mid_hook || mid == table_mid_)) return;
    const double N = model_->grid.num_ticks;
    const double dt = params_.dt();
    StencilScaling sc;
    sc.drift_factor = dt;
    sc.noise_factor = std::sqrt(dt * N);
    sc.diffusion_factor = dt * N * N;
    bid_tables_ = build_stencil_tables(model_->coeffs, Side::bid, model_->grid.num_ticks, mid, sc);
    ask_tables_ = build_stencil_tables(model_->coeffs, Side::ask, model_->grid.num_ticks, mid, sc);
    built_ = true;
    table_mid_ = mid;
}

void MacroStepper::field_step(MacroField& field, Rng& rng) {
    const std::size_t levels = out_.size();
    if (field.book.bid.size() != levels || field.book.ask.size() != levels)
        throw ConfigError("macro: field has " + std::to_string(field.book.bid.size()) + " points, grid expects " +
                          std::to_string(levels));
    ensure_tables(field.book.mid);
    for (double& z : z_bid_) z = draw_normal(rng);
    for (double& z : z_ask_) z = draw_normal(rng);
    if (!simd::reflected_step(field.book.bid, z_bid_, bid_tables_, out_, clip_bid_))
        throw NumericalError("macro: non-finite bid field at step " + std::to_string(field.step));
    field.book.bid.swap(out_);
    if (!simd::reflected_step(field.book.ask, z_ask_, ask_tables_, out_, clip_ask_))
        throw NumericalError("macro: non-finite ask field at step " + std::to_string(field.step));
    field.book.ask.swap(out_);
    ++field.step;
}

void field_step(MacroField& field, const MacroModel& model, const SchemeParams& params, Rng& rng) {
    MacroStepper stepper(model, params);
    stepper.field_step(field, rng);
}

MacroResult simulate_macro(const MacroField& init, const MacroModel& model, const SchemeParams& params, Rng& rng,
                           const MacroOptions& options) {
    model.validate();
    params.validate();
    const auto levels = static_cast<std::size_t>(model.grid.interior());
    if (init.book.bid.size() != levels || init.book.ask.size() != levels)
        throw ConfigError("macro: initial field has " + std::to_string(init.book.bid.size()) +
                          " points, grid expects " + std::to_string(levels));
    for (double v : init.book.bid)
        if (!(v >= 0.0)) throw ConfigError("macro: initial field must be nonnegative and finite");
    for (double v : init.book.ask)
        if (!(v >= 0.0)) throw ConfigError("macro: initial field must be nonnegative and finite");

    MacroStepper stepper(model, params);
    MacroResult res;
    res.final_field = init;
    res.final_field.step = 0;
    MacroField& field = res.final_field;
    const std::int64_t M = params.steps;
    const double dt = params.dt();

    std::vector<std::int64_t> snap_steps;
    if (options.regular_snapshots) {
        const std::int64_t every = params.snapshot_every > 0 ? params.snapshot_every : std::max<std::int64_t>(1, M / 5);
        for (std::int64_t j = 0; j <= M; j += every) snap_steps.push_back(j);
        if (snap_steps.back() != M) snap_steps.push_back(M);
    }
    for (double t : options.snapshot_times)
        if (t >= 0.0 && t <= params.horizon) snap_steps.push_back(std::llround(t / dt));
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());
    std::size_t next_snap = 0;
    auto record = [&](std::int64_t j) {
        while (next_snap < snap_steps.size() && snap_steps[next_snap] <= j) {
            res.snapshots.push_back({static_cast<double>(j) * dt, field.book});
            ++next_snap;
        }
    };

    std::vector<double> sum_bid(levels, 0.0), sum_ask(levels, 0.0);
    res.price_path.push_back({0.0, field.book.mid});
    record(0);
    for (std::int64_t j = 0; j < M; ++j) {
        const double before = field.book.mid;
        const Jump jump = price_update(field, model, params, rng);
        if (jump != Jump::none) {
            (jump == Jump::up ? res.up_jumps : res.down_jumps)++;
            const double dp = field.book.mid - before;
            res.quadratic_variation += dp * dp;
            res.price_path.push_back({static_cast<double>(j) * dt, field.book.mid});
        }
        stepper.field_step(field, rng);
        for (Side s : {Side::bid, Side::ask})
            for (double c : stepper.last_clip(s)) {
                res.total_clip += c;
                res.max_clip = std::max(res.max_clip, c);
            }
        for (std::size_t i = 0; i < levels; ++i) {
            sum_bid[i] += field.book.bid[i];
            sum_ask[i] += field.book.ask[i];
        }
        record(j + 1);
    }
    res.average_profile = RealBook(std::move(sum_bid), std::move(sum_ask), field.book.mid);
    for (double& v : res.average_profile.bid) v /= static_cast<double>(M);
    for (double& v : res.average_profile.ask) v /= static_cast<double>(M);
    return res;
}

} // namespace lobsim::macro
