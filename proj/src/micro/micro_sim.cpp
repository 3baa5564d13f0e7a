#include "lobsim/micro/micro_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lobsim/error.hpp"

namespace lobsim::micro {

namespace {

std::vector<double> to_real(const std::vector<long long>& v, double scale = 1.0) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]) * scale;
    return out;
}

RealBook real_book(const MicroBook& b, double scale = 1.0) {
    return RealBook(to_real(b.bid, scale), to_real(b.ask, scale), b.mid);
}

} // namespace

void MicroModel::validate() const {
    grid.validate();
    coeffs.validate(true);
    if (price_dynamics) price.validate();
    if (!(n >= 1.0)) throw ConfigError("micro: scale index n must be >= 1");
}

MicroSimulator::MicroSimulator(const MicroModel& model, MicroBook book, double time)
    : model_(&model), book_(std::move(book)), time_(time),
      levels_(static_cast<std::size_t>(model.grid.interior())) {
    if (book_.bid.size() != levels_ || book_.ask.size() != levels_)
        throw ConfigError("micro: initial book has " + std::to_string(book_.bid.size()) + " levels, grid expects " +
                          std::to_string(levels_));
    for (auto v : book_.bid)
        if (v < 0) throw ConfigError("micro: negative initial volume");
    for (auto v : book_.ask)
        if (v < 0) throw ConfigError("micro: negative initial volume");
    window_levels_ = std::min<int>(static_cast<int>(levels_),
                                   static_cast<int>(std::ceil(model.price.window * model.grid.num_ticks - 1e-9)) + 1);
    rates_.assign(2 * levels_ * kinds, 0.0);
    scratch_bid_.resize(levels_);
    scratch_ask_.resize(levels_);
    refresh_all();
}

void MicroSimulator::refresh_level(int side, int level_index) {
    const Side s = side == 0 ? Side::bid : Side::ask;
    const MicroRates r = eval_rates_micro(model_->coeffs, s, level_index + 1, book_.side(s)[static_cast<std::size_t>(level_index)],
                                          model_->grid.num_ticks, model_->n, book_.mid);
    rates_[channel(side, level_index, 0)] = r.add;
    rates_[channel(side, level_index, 1)] = r.remove;
    rates_[channel(side, level_index, 2)] = r.left;
    rates_[channel(side, level_index, 3)] = r.right;
}

void MicroSimulator::refresh_theta() {
    if (!model_->price_dynamics) {
        theta_ = {};
        return;
    }
    const double inv_root_n = 1.0 / std::sqrt(model_->n);
    const int N = model_->grid.num_ticks;
    const double mass = integrate_window(
        [&](int i) {
            const auto l = static_cast<std::size_t>(i - 1);
            return static_cast<double>(book_.bid[l] - book_.ask[l]) * inv_root_n;
        },
        N, model_->price.window);
    const ThetaRates th = theta_from_imbalance(mass, model_->price);
    theta_ = {th.up / model_->n, th.down / model_->n};
}

void MicroSimulator::refresh_all() {
    for (int s = 0; s < 2; ++s)
        for (std::size_t l = 0; l < levels_; ++l) refresh_level(s, static_cast<int>(l));
    refresh_theta();
}

double MicroSimulator::total_rate() const {
    return std::accumulate(rates_.begin(), rates_.end(), 0.0) + theta_.up + theta_.down;
}

StepOutcome MicroSimulator::step(Rng& rng, double limit) {
    StepOutcome out;
    const double total = total_rate();
    if (!(total > 0.0)) {
        out.status = StepOutcome::Status::frozen;
        return out;
    }
    if (!std::isfinite(total)) throw NumericalError("micro: total event rate is not finite");

    out.dt = draw_exponential(rng) / total;
    if (time_ + out.dt > limit) {
        // No event in (time_, limit]; restarting from time_ would let the
        // next draw land inside an interval already known to be empty.
        time_ = limit;
        out.status = StepOutcome::Status::horizon;
        return out;
    }
    double target = draw_uniform(rng) * total;

    std::size_t chosen = rates_.size();
    for (std::size_t c = 0; c < rates_.size(); ++c) {
        if (rates_[c] <= 0.0) continue;
        if (target < rates_[c]) {
            chosen = c;
            break;
        }
        target -= rates_[c];
    }

    time_ += out.dt;

    if (chosen == rates_.size()) {
        // Price clocks. Rounding can leave `target` just past the last book
        // channel with both price rates zero; fall back to the last positive
        // book channel in that case.
        if (theta_.up + theta_.down <= 0.0) {
            for (std::size_t c = rates_.size(); c-- > 0;)
                if (rates_[c] > 0.0) {
                    chosen = c;
                    break;
                }
        } else {
            const Direction dir = target < theta_.up || theta_.down <= 0.0 ? Direction::up : Direction::down;
            PriceEvent ev;
            ev.time = time_;
            ev.direction = dir;
            ev.bid = to_real(book_.bid);
            ev.ask = to_real(book_.ask);
            regenerate(book_.bid, book_.ask, dir, model_->regeneration, rng, model_->n);
            book_.mid += dir == Direction::up ? model_->grid.jump_size : -model_->grid.jump_size;
            ev.new_mid = book_.mid;
            refresh_all();
            out.status = StepOutcome::Status::price_event;
            out.price = std::move(ev);
            return out;
        }
    }

    const int side = static_cast<int>(chosen / (levels_ * kinds));
    const int level_index = static_cast<int>((chosen / kinds) % levels_);
    const int kind = static_cast<int>(chosen % kinds);
    const Side s = side == 0 ? Side::bid : Side::ask;
    auto& v = book_.side(s);
    const auto l = static_cast<std::size_t>(level_index);
    switch (kind) {
    case 0:
        ++v[l];
        break;
    case 1:
        --v[l];
        break;
    case 2:
        --v[l];
        if (l > 0) ++v[l - 1];
        break;
    default:
        --v[l];
        if (l + 1 < levels_) ++v[l + 1];
        break;
    }
    refresh_level(side, level_index);
    if (kind == 2 && l > 0) refresh_level(side, level_index - 1);
    if (kind == 3 && l + 1 < levels_) refresh_level(side, level_index + 1);
    if (level_index <= window_levels_) refresh_theta();

    out.status = StepOutcome::Status::book_event;
    out.event = {time_, s, level_index + 1, static_cast<EventKind>(kind)};
    return out;
}

StepOutcome step_micro(MicroBook& book, const MicroModel& model, Rng& rng) {
    MicroSimulator sim(model, book);
    StepOutcome out = sim.step(rng);
    book = sim.book();
    return out;
}

MicroPath simulate_micro(const MicroBook& init, const MicroModel& model, double horizon, Rng& rng,
                         const MicroOptions& options) {
    model.validate();
    if (horizon < 0.0) throw ConfigError("micro: horizon must be >= 0");
    std::vector<double> snaps = options.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::remove_if(snaps.begin(), snaps.end(), [&](double t) { return t < 0.0 || t > horizon; }), snaps.end());

    MicroPath path;
    path.n = model.n;
    MicroSimulator sim(model, init);
    std::size_t next_snap = 0;

    if (horizon == 0.0) {
        for (double t : snaps) path.snapshots.push_back({t, real_book(init)});
        path.final_book = init;
        return path;
    }

    for (;;) {
        const double limit = next_snap < snaps.size() ? snaps[next_snap] : horizon;
        StepOutcome o = sim.step(rng, limit);
        if (o.status == StepOutcome::Status::horizon) {
            if (next_snap < snaps.size()) {
                path.snapshots.push_back({snaps[next_snap], real_book(sim.book())});
                ++next_snap;
                continue;
            }
            break;
        }
        if (o.status == StepOutcome::Status::frozen) {
            path.frozen = true;
            for (; next_snap < snaps.size(); ++next_snap) path.snapshots.push_back({snaps[next_snap], real_book(sim.book())});
            break;
        }
        ++path.event_count;
        if (path.event_count > options.event_cap)
            throw RunawayError("micro: event cap of " + std::to_string(options.event_cap) + " exceeded at time " +
                               std::to_string(sim.time()) + " (total rate " + std::to_string(sim.total_rate()) + ")");
        if (o.status == StepOutcome::Status::price_event)
            path.price_events.push_back(std::move(*o.price));
        else if (options.record_events)
            path.events.push_back(o.event);
    }
    path.final_book = sim.book();
    path.final_time = horizon;
    return path;
}

MicroPath rescale_path(const MicroPath& path, double n) {
    if (!(n >= 1.0)) throw ConfigError("rescale_path: n must be >= 1");
    const double inv_root_n = 1.0 / std::sqrt(n);
    MicroPath out = path;
    for (auto& e : out.events) e.time /= n;
    for (auto& s : out.snapshots) {
        s.time /= n;
        for (double& v : s.book.bid) v *= inv_root_n;
        for (double& v : s.book.ask) v *= inv_root_n;
    }
    for (auto& p : out.price_events) {
        p.time /= n;
        for (double& v : p.bid) v *= inv_root_n;
        for (double& v : p.ask) v *= inv_root_n;
    }
    out.final_time /= n;
    return out;
}

MicroBook initial_from_meso(const RealBook& book, double n) {
    const double root_n = std::sqrt(n);
    MicroBook out(book.levels());
    out.mid = book.mid;
    for (std::size_t i = 0; i < book.bid.size(); ++i) out.bid[i] = std::llround(book.bid[i] * root_n);
    for (std::size_t i = 0; i < book.ask.size(); ++i) out.ask[i] = std::llround(book.ask[i] * root_n);
    return out;
}

} // namespace lobsim::micro
