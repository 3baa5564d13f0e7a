#include "lobsim/calibration/synthetic.hpp"

#include <cmath>
#include <fstream>

#include "lobsim/error.hpp"

namespace lobsim::calibration {

namespace {

class FlowWriter {
public:
    FlowWriter(const SyntheticSpec& spec, const RowSink& sink)
        : spec_(spec), sink_(sink), levels_(spec.model.grid.interior()), row_(levels_) {
        mid_ = spec.start_mid_ticks;
        set_prices();
    }

    void set_sizes(const std::vector<long long>& bid, const std::vector<long long>& ask) {
        row_.bid_size = bid;
        row_.ask_size = ask;
    }

    void shift_mid(int ticks) {
        mid_ += ticks;
        set_prices();
    }

    long long& size(Side s, std::size_t i) { return s == Side::bid ? row_.bid_size[i] : row_.ask_size[i]; }
    long long price(Side s, std::size_t i) const { return s == Side::bid ? row_.bid_price[i] : row_.ask_price[i]; }

    void emit(double seconds, int type, Side s, std::size_t i, long long size) {
        emit_at(seconds, type, s, price(s, i), size);
    }

    void emit_at(double seconds, int type, Side s, long long px, long long size) {
        LobsterMessage m;
        // Whole nanoseconds, so the 9-decimal text form reads back exactly.
        m.time = std::round(seconds * 1e9) / 1e9;
        m.type = type;
        m.order_id = ++order_id_;
        m.size = size;
        m.price = px;
        m.direction = s == Side::bid ? 1 : -1;
        sink_(m, row_);
        ++rows_;
    }

    const BookRow& row() const { return row_; }
    std::uint64_t rows() const { return rows_; }

private:
    void set_prices() {
        const long long mid_px = mid_ * spec_.tick;
        for (int l = 0; l < levels_; ++l) {
            row_.bid_price[static_cast<std::size_t>(l)] = mid_px - (l + 1) * spec_.tick;
            row_.ask_price[static_cast<std::size_t>(l)] = mid_px + (l + 1) * spec_.tick;
        }
    }

    const SyntheticSpec& spec_;
    const RowSink& sink_;
    int levels_;
    BookRow row_;
    long long mid_ = 0;
    long long order_id_ = 0;
    std::uint64_t rows_ = 0;
};

} // namespace

SyntheticSummary generate_synthetic(const SyntheticSpec& spec, Rng& rng, const RowSink& sink) {
    spec.model.validate();
    spec.scheme.validate();
    if (spec.max_age_steps < 1) throw ConfigError("synthetic: max_age_steps must be >= 1");
    if (!(spec.flush_fraction > 0.0)) throw ConfigError("synthetic: flush_fraction must be positive");
    if (!(spec.volume_unit > 0.0)) throw ConfigError("synthetic: volume_unit must be positive");
    const auto L = static_cast<std::size_t>(spec.model.grid.interior());
    if (spec.initial.bid.size() != L || spec.initial.ask.size() != L)
        throw ConfigError("synthetic: initial profile does not match the grid");
    const double V = spec.volume_unit;
    const double dt = spec.scheme.dt();
    const int N = spec.model.grid.num_ticks;
    const int jump_ticks = static_cast<int>(std::llround(spec.model.grid.jump_size / spec.model.grid.tick_size));

    macro::MacroStepper stepper(spec.model, spec.scheme);
    macro::MacroField field;
    field.book = spec.initial;
    FlowWriter out(spec, sink);

    auto to_shares = [&](double u) { return std::llround(u * V); };
    std::vector<long long> book_bid(L), book_ask(L);
    auto sync_book = [&] {
        for (std::size_t i = 0; i < L; ++i) {
            book_bid[i] = to_shares(field.book.bid[i]);
            book_ask[i] = to_shares(field.book.ask[i]);
        }
        out.set_sizes(book_bid, book_ask);
    };
    sync_book();

    std::vector<double> xi_bid(L, 0.0), xi_ask(L, 0.0);
    std::vector<std::int64_t> age_bid(L, 0), age_ask(L, 0);
    SyntheticSummary summary;
    double imb_sum = 0.0, abs_imb_sum = 0.0;
    auto seconds = [&](double t) { return spec.start_seconds + t * spec.seconds_per_unit; };

    // Emits the pending change of one level and side at time `when`.
    auto flush = [&](Side s, std::size_t i, double when) {
        auto& xi = s == Side::bid ? xi_bid : xi_ask;
        auto& age = s == Side::bid ? age_bid : age_ask;
        long long& queue = out.size(s, i);
        const long long target = to_shares(field.book.side(s)[i]);
        long long noise = std::llround(xi[i] * V);
        if (noise < -queue) noise = -queue;
        const long long rest = target - queue - noise;
        xi[i] = 0.0;
        age[i] = 0;
        auto units = [&] {
            for (long long k = 0; k < std::llabs(rest); ++k) {
                queue += rest > 0 ? 1 : -1;
                out.emit(when, rest > 0 ? 1 : 3, s, i, 1);
            }
        };
        auto noise_order = [&] {
            if (noise == 0) return;
            queue += noise;
            out.emit(when, noise > 0 ? 1 : 3, s, i, std::llabs(noise));
        };
        // Additions first so that a cancellation never exceeds the queue.
        if (rest > 0) {
            units();
            noise_order();
        } else {
            noise_order();
            units();
        }
    };

    for (std::int64_t j = 0; j < spec.scheme.steps; ++j) {
        const double t = static_cast<double>(j) * dt;
        // Decide the jump first so the pre-jump book can be flushed.
        const double y = draw_uniform(rng);
        const macro::JumpProbabilities p = macro::jump_probabilities(field, spec.model, spec.scheme);
        if (y < p.up + p.down) {
            for (std::size_t i = 0; i < L; ++i)
                for (Side s : {Side::bid, Side::ask}) flush(s, i, seconds(t));
            const macro::Jump jump = macro::price_update(field, spec.model, spec.scheme, rng, y);
            const Direction d = jump == macro::Jump::up ? Direction::up : Direction::down;
            // The best queue on the side the price moves into is consumed.
            const Side eaten = d == Direction::up ? Side::ask : Side::bid;
            const long long best = out.size(eaten, 0);
            const long long px = out.price(eaten, 0);
            // Rounding commutes with the shift, so the regenerated field gives
            // the post-jump book directly.
            out.shift_mid(d == Direction::up ? jump_ticks : -jump_ticks);
            sync_book();
            out.emit_at(seconds(t) + 1e-9, best > 0 ? 4 : 5, eaten, px, best > 0 ? best : 1);
            (jump == macro::Jump::up ? summary.up_jumps : summary.down_jumps)++;
        }
        const std::vector<double> prev_bid = field.book.bid, prev_ask = field.book.ask;
        stepper.field_step(field, rng);
        const double when = seconds(static_cast<double>(j + 1) * dt);
        for (Side s : {Side::bid, Side::ask}) {
            const auto& tab = stepper.tables(s);
            const auto z = stepper.last_noise(s);
            const auto& u0 = s == Side::bid ? prev_bid : prev_ask;
            auto& xi = s == Side::bid ? xi_bid : xi_ask;
            auto& age = s == Side::bid ? age_bid : age_ask;
            for (std::size_t i = 0; i < L; ++i) {
                xi[i] += (tab.vol_base[i] + tab.vol_slope[i] * u0[i]) * z[i];
                ++age[i];
                const double queue = static_cast<double>(out.size(s, i));
                if (std::abs(xi[i]) * V >= std::max(1.0, spec.flush_fraction * queue) || age[i] >= spec.max_age_steps ||
                    j + 1 == spec.scheme.steps) {
                    flush(s, i, when);
                } else {
                    // Drift and reflection go out as soon as they add up to a share,
                    // so the book lags the field only by the pending noise.
                    long long& q = out.size(s, i);
                    const long long gap = to_shares(field.book.side(s)[i] - xi[i]) - q;
                    const long long n = gap > 0 ? gap : -std::min(-gap, q);
                    for (long long k = 0; k < std::llabs(n); ++k) {
                        q += n > 0 ? 1 : -1;
                        out.emit(when, n > 0 ? 1 : 3, s, i, 1);
                    }
                }
            }
        }
        const double imb = (field.book.bid[0] - field.book.ask[0]) / (2.0 * N);
        imb_sum += imb;
        abs_imb_sum += std::abs(imb);
    }
    summary.rows = out.rows();
    summary.mean_imbalance = imb_sum / static_cast<double>(spec.scheme.steps);
    summary.mean_abs_imbalance = abs_imb_sum / static_cast<double>(spec.scheme.steps);
    return summary;
}
SyntheticSummary write_synthetic(const SyntheticSpec& spec, Rng& rng, const std::filesystem::path& dir,
                                 const std::string& stem) {
    std::filesystem::create_directories(dir);
    const auto msg_path = dir / (stem + "_message.csv");
    const auto book_path = dir / (stem + "_orderbook.csv");
    std::ofstream msg(msg_path), book(book_path);
    if (!msg || !book) throw DataError("synthetic: cannot write into " + dir.string());
    std::string line;
    const RowSink sink = [&](const LobsterMessage& m, const BookRow& row) {
        msg << format_message_line(m) << '\n';
        line.clear();
        append_book_line(line, row);
        book << line << '\n';
    };
    return generate_synthetic(spec, rng, sink);
}

} // namespace lobsim::calibration
