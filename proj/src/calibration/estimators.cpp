#include "lobsim/calibration/estimators.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lobsim/error.hpp"
#include "lobsim/log.hpp"

namespace lobsim::calibration {

void CalibrationSettings::validate() const {
    if (!(volume_unit > 0.0)) throw ConfigError("calibration: volume_unit must be positive");
    if (space_levels < 2) throw ConfigError("calibration: space_levels must be >= 2");
    if (!(session_minutes > 0.0)) throw ConfigError("calibration: session_minutes must be positive");
    if (alpha < 0.0) throw ConfigError("calibration: alpha must be >= 0");
    if (tick <= 0) throw ConfigError("calibration: tick must be positive");
}

double estimate_volatility(double pooled_sum_sq, const CalibrationSettings& s) {
    return std::sqrt(pooled_sum_sq / (2.0 * s.space_levels * s.session_minutes));
}

double estimate_drift(double net_flow, double laplacian, const CalibrationSettings& s) {
    return net_flow / s.session_minutes - s.alpha * laplacian;
}

PriceEstimates estimate_price_params(double p0, double p1, double sum_sq_changes, double imbalance,
                                     double abs_imbalance, const CalibrationSettings& s) {
    PriceEstimates out;
    double imbalance_jumps = 0.0;
    if (imbalance != 0.0) {
        out.gamma = (p1 - p0) / (s.session_minutes * imbalance) + 0.0;  // no -0 in reports
        imbalance_jumps = s.session_minutes * *out.gamma * abs_imbalance;
    }
    out.delta_raw = (sum_sq_changes - imbalance_jumps) / (2.0 * s.session_minutes);
    out.delta = out.delta_raw;
    if (out.delta < 0.0) {
        out.delta = 0.0;
        out.delta_clamped = true;
    }
    return out;
}

nlohmann::json EstimateSet::to_json() const {
    nlohmann::json j;
    j["settings"] = {{"volume_unit", settings.volume_unit},
                     {"space_levels", settings.space_levels},
                     {"session_minutes", settings.session_minutes},
                     {"alpha", settings.alpha},
                     {"tick", settings.tick},
                     {"exclude_unoccupied", settings.exclude_unoccupied},
                     {"averaging", settings.averaging == ImbalanceAveraging::time_weighted ? "time_weighted" : "per_row"}};
    j["gamma"] = gamma ? nlohmann::json(*gamma) : nlohmann::json(nullptr);
    j["gamma_estimable"] = gamma.has_value();
    j["delta"] = delta;
    j["delta_raw"] = delta_raw;
    j["imbalance"] = imbalance;
    j["abs_imbalance"] = abs_imbalance;
    j["sigma"] = sigma;
    j["drift"] = drift;
    j["diagnostics"] = {{"rows", rows},
                        {"timestamp_groups", groups},
                        {"excluded_unoccupied", excluded_unoccupied},
                        {"outside_grid", outside_grid},
                        {"ignored_type_6_7", ignored_type},
                        {"price_start_ticks", p0},
                        {"price_end_ticks", p1},
                        {"price_qv_ticks2", price_qv},
                        {"price_changes", price_changes},
                        {"multi_tick_changes", multi_tick_changes}};
    j["warnings"] = warnings;
    return j;
}

CalibrationAccumulator::CalibrationAccumulator(CalibrationSettings settings) : s_(settings) {
    s_.validate();
    const auto L = static_cast<std::size_t>(s_.levels());
    for (auto* v : {&d_bid_, &d_ask_, &c_bid_, &c_ask_, &events_}) v->assign(L, 0);
    for (auto* v : {&sum_sq_, &lap_sum_, &bid_sum_, &ask_sum_}) v->assign(L, 0.0);
}

CalibrationAccumulator::Dense CalibrationAccumulator::densify(const BookRow& row) const {
    Dense d;
    const auto L = static_cast<std::size_t>(s_.levels());
    d.bid.assign(L, 0.0);
    d.ask.assign(L, 0.0);
    if (row.levels() == 0) return d;
    d.has_bid = row.bid_price[0] != kEmptyBidPrice;
    d.has_ask = row.ask_price[0] != kEmptyAskPrice;
    d.bid1 = row.bid_price[0];
    d.ask1 = row.ask_price[0];
    for (std::size_t l = 0; l < row.ask_price.size(); ++l) {
        if (d.has_bid && row.bid_price[l] != kEmptyBidPrice) {
            const long long gap = d.bid1 - row.bid_price[l];
            if (gap >= 0 && gap % s_.tick == 0 && gap / s_.tick < static_cast<long long>(L))
                d.bid[static_cast<std::size_t>(gap / s_.tick)] += static_cast<double>(row.bid_size[l]);
        }
        if (d.has_ask && row.ask_price[l] != kEmptyAskPrice) {
            const long long gap = row.ask_price[l] - d.ask1;
            if (gap >= 0 && gap % s_.tick == 0 && gap / s_.tick < static_cast<long long>(L))
                d.ask[static_cast<std::size_t>(gap / s_.tick)] += static_cast<double>(row.ask_size[l]);
        }
    }
    return d;
}

long long CalibrationAccumulator::size_at(const BookRow& row, long long price, int direction) const {
    const auto& px = direction > 0 ? row.bid_price : row.ask_price;
    const auto& sz = direction > 0 ? row.bid_size : row.ask_size;
    for (std::size_t l = 0; l < px.size(); ++l)
        if (px[l] == price) return sz[l];
    return 0;
}

void CalibrationAccumulator::accumulate_book(const Dense& d, double w) {
    if (w <= 0.0) return;
    const auto L = static_cast<std::size_t>(s_.levels());
    const double V = s_.volume_unit;
    const double N2 = static_cast<double>(s_.space_levels) * s_.space_levels;
    for (std::size_t i = 0; i < L; ++i) {
        const double bl = i > 0 ? d.bid[i - 1] : 0.0, br = i + 1 < L ? d.bid[i + 1] : 0.0;
        const double al = i > 0 ? d.ask[i - 1] : 0.0, ar = i + 1 < L ? d.ask[i + 1] : 0.0;
        const double lap_b = N2 * (bl + br - 2.0 * d.bid[i]) / V;
        const double lap_a = N2 * (al + ar - 2.0 * d.ask[i]) / V;
        lap_sum_[i] += w * 0.5 * (lap_b + lap_a);
        bid_sum_[i] += w * d.bid[i] / V;
        ask_sum_[i] += w * d.ask[i] / V;
    }
    const double diff = d.bid[0] - d.ask[0];
    imb_sum_ += w * diff;
    abs_imb_sum_ += w * std::abs(diff);
    weight_sum_ += w;
}

void CalibrationAccumulator::add(const LobsterMessage& message, const BookRow& row) {
    if (!group_msgs_.empty() && message.time != group_time_) {
        if (message.time < group_time_)
            throw DataError("calibration: message times decrease at row " + std::to_string(rows_ + 1));
        close_group();
    }
    if (group_msgs_.empty()) group_time_ = message.time;
    if (rows_ == 0) first_time_ = message.time;
    group_msgs_.push_back(message);
    group_row_ = row;
    ++rows_;
}

void CalibrationAccumulator::close_group() {
    if (group_msgs_.empty()) return;
    ++groups_;
    const Dense dense = densify(group_row_);
    const auto L = static_cast<std::size_t>(s_.levels());

    for (const LobsterMessage& m : group_msgs_) {
        if (m.type >= 6) {
            ++ignored_;
            continue;
        }
        const bool bid = m.direction > 0;
        if (bid ? !dense.has_bid : !dense.has_ask) {
            ++outside_;
            continue;
        }
        const long long gap = bid ? dense.bid1 - m.price : m.price - dense.ask1;
        if (gap < 0 || gap % s_.tick != 0 || gap / s_.tick >= static_cast<long long>(L)) {
            ++outside_;
            continue;
        }
        const auto i = static_cast<std::size_t>(gap / s_.tick);
        if (m.type == 1) {
            const long long before =
                have_prev_ ? size_at(prev_row_, m.price, m.direction) : size_at(group_row_, m.price, m.direction) - m.size;
            if (before <= 0 && s_.exclude_unoccupied) {
                ++excluded_;
                continue;
            }
            ++(bid ? d_bid_ : d_ask_)[i];
        } else {
            ++(bid ? c_bid_ : c_ask_)[i];
        }
        // Squared sizes in shares are integers, so the sum is exact and does
        // not depend on the order of rows; the unit is applied at the end.
        const double x = static_cast<double>(m.size);
        sum_sq_[i] += x * x;
        ++events_[i];
    }

    // Time averages. The previous group's book holds until this group's time.
    if (s_.averaging == ImbalanceAveraging::time_weighted) {
        if (have_last_) accumulate_book(last_dense_, group_time_ - last_time_);
    } else {
        accumulate_book(dense, static_cast<double>(group_msgs_.size()));
    }

    if (dense.has_bid && dense.has_ask) {
        const double p = static_cast<double>(dense.ask1 + dense.bid1) / (2.0 * static_cast<double>(s_.tick));
        if (!have_price_) {
            p0_ = p;
            have_price_ = true;
        } else if (p != last_price_) {
            const double dp = p - last_price_;
            qv_ += dp * dp;
            ++changes_;
            if (std::abs(dp) > 1.0 + 1e-9) ++multi_;
        }
        last_price_ = p;
    }

    last_dense_ = dense;
    have_last_ = true;
    last_time_ = group_time_;
    prev_row_ = group_row_;
    have_prev_ = true;
    group_msgs_.clear();
}

EstimateSet CalibrationAccumulator::finish() {
    close_group();
    EstimateSet e;
    e.settings = s_;
    const auto L = static_cast<std::size_t>(s_.levels());
    // A single timestamp has no duration; use its book with unit weight.
    if (weight_sum_ <= 0.0 && have_last_) accumulate_book(last_dense_, 1.0);
    const double w = weight_sum_ > 0.0 ? weight_sum_ : 1.0;
    const double V = s_.volume_unit;

    e.sigma.resize(L);
    e.drift.resize(L);
    e.laplacian.resize(L);
    e.mean_bid.resize(L);
    e.mean_ask.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
        e.laplacian[i] = lap_sum_[i] / w;
        e.mean_bid[i] = bid_sum_[i] / w;
        e.mean_ask[i] = ask_sum_[i] / w;
        e.sum_sq.push_back(sum_sq_[i] / (V * V));
        e.sigma[i] = estimate_volatility(e.sum_sq[i], s_);
        const double net = 0.5 * static_cast<double>(d_ask_[i] + d_bid_[i] - c_ask_[i] - c_bid_[i]) / V;
        e.drift[i] = estimate_drift(net, e.laplacian[i], s_);
    }
    for (std::size_t i = 0; i < L; ++i)
        if (events_[i] == 0 && rows_ > 0) {
            e.warnings.push_back("no events at relative level " + std::to_string(i + 1) + "; sigma set to 0");
        }
    const double scale = 1.0 / (2.0 * s_.space_levels * V);
    e.imbalance = imb_sum_ / w * scale;
    e.abs_imbalance = abs_imb_sum_ / w * scale;
    e.p0 = p0_;
    e.p1 = have_price_ ? last_price_ : p0_;
    e.price_qv = qv_;
    e.price_changes = changes_;
    e.multi_tick_changes = multi_;

    const PriceEstimates pe = estimate_price_params(e.p0, e.p1, qv_, e.imbalance, e.abs_imbalance, s_);
    e.gamma = pe.gamma;
    e.delta = pe.delta;
    e.delta_raw = pe.delta_raw;
    if (!pe.gamma && rows_ > 0) e.warnings.push_back("average imbalance is zero; gamma is not estimable");
    if (pe.delta_clamped) {
        std::ostringstream msg;
        msg << "delta estimate " << pe.delta_raw << " is negative; clamped to 0";
        e.warnings.push_back(msg.str());
    }
    if (multi_ > 0)
        e.warnings.push_back(std::to_string(multi_) + " price changes exceed one tick; kept in the QV sum as-is");

    e.submit_bid = d_bid_;
    e.submit_ask = d_ask_;
    e.remove_bid = c_bid_;
    e.remove_ask = c_ask_;
    e.events = events_;
    e.rows = rows_;
    e.groups = groups_;
    e.excluded_unoccupied = excluded_;
    e.outside_grid = outside_;
    e.ignored_type = ignored_;
    for (const auto& msg : e.warnings)
        if (msg.rfind("no events", 0) != 0) warn("calibration: " + msg);
    return e;
}

EstimateSet calibrate(std::istream& messages, std::istream& book, int levels, const CalibrationSettings& s) {
    LobsterReader reader(messages, book, levels);
    CalibrationAccumulator acc(s);
    LobsterMessage m;
    BookRow r;
    while (reader.next(m, r)) acc.add(m, r);
    return acc.finish();
}

EstimateSet calibrate(const LobsterData& data, const CalibrationSettings& s) {
    if (data.messages.size() != data.book.size())
        throw DataError("calibration: message and book row counts differ");
    CalibrationAccumulator acc(s);
    for (std::size_t k = 0; k < data.messages.size(); ++k) acc.add(data.messages[k], data.book[k]);
    return acc.finish();
}

void write_estimates(const EstimateSet& e, const std::filesystem::path& json_path,
                     const std::filesystem::path& csv_path) {
    std::ofstream js(json_path);
    if (!js) throw DataError("cannot write " + json_path.string());
    js << std::setw(2) << e.to_json() << '\n';

    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot write " + csv_path.string());
    csv << "# sigma in model volume units per sqrt(minute); drift in model volume units per minute; counts in orders\n";
    csv << "level,x,sigma,drift,laplacian,mean_bid,mean_ask,submit_bid,submit_ask,remove_bid,remove_ask,events\n";
    csv << std::setprecision(10);
    for (std::size_t i = 0; i < e.sigma.size(); ++i)
        csv << i + 1 << ',' << static_cast<double>(i + 1) / e.settings.space_levels << ',' << e.sigma[i] << ','
            << e.drift[i] << ',' << e.laplacian[i] << ',' << e.mean_bid[i] << ',' << e.mean_ask[i] << ','
            << e.submit_bid[i] << ',' << e.submit_ask[i] << ',' << e.remove_bid[i] << ',' << e.remove_ask[i] << ','
            << e.events[i] << '\n';
}

} // namespace lobsim::calibration
