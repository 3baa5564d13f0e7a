#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lobsim/calibration/lobster.hpp"

namespace lobsim::calibration {

enum class ImbalanceAveraging { time_weighted, per_row };

// Scaling constants of the estimators. Defaults follow the one-hour,
// 50-level, one-cent-tick setting: volumes in units of 10^4 shares, queue i
// at position i/51, time in minutes.
struct CalibrationSettings {
    double volume_unit = 1e4;      // shares per model volume unit
    int space_levels = 51;         // queues map to i / space_levels
    double session_minutes = 60.0;
    double alpha = 0.01;
    long long tick = 100;          // price units (dollars * 10^4) per tick
    ImbalanceAveraging averaging = ImbalanceAveraging::time_weighted;
    bool exclude_unoccupied = true;  // drop submissions into empty queues

    int levels() const { return space_levels - 1; }
    void validate() const;
};

// sigma_hat = sqrt(sum_sq / (2 * space_levels * minutes)), with sum_sq the
// pooled sum over both sides of (size / volume_unit)^2.
double estimate_volatility(double pooled_sum_sq, const CalibrationSettings& s);

// f_hat = net_flow / minutes - alpha * laplacian, with net_flow the half sum
// (d^a + d^b - c^a - c^b) / volume_unit and laplacian the time-averaged
// Dirichlet Laplacian at that level.
double estimate_drift(double net_flow, double laplacian, const CalibrationSettings& s);

struct PriceEstimates {
    std::optional<double> gamma;  // empty when the average imbalance is zero
    double delta = 0.0;
    bool delta_clamped = false;
    double delta_raw = 0.0;
};

// gamma = (P1 - P0) / (minutes * I), delta = (sum dP^2 - minutes * gamma * I~) / (2 * minutes).
// Prices in ticks. With I = 0, gamma is not estimable and delta uses the full QV.
PriceEstimates estimate_price_params(double p0, double p1, double sum_sq_changes, double imbalance,
                                     double abs_imbalance, const CalibrationSettings& s);

struct EstimateSet {
    CalibrationSettings settings;
    std::vector<double> sigma;  // per relative level 1..levels
    std::vector<double> drift;
    std::optional<double> gamma;
    double delta = 0.0;
    double imbalance = 0.0;
    double abs_imbalance = 0.0;

    // Diagnostics.
    std::vector<std::int64_t> submit_bid, submit_ask;  // d^b_i, d^a_i
    std::vector<std::int64_t> remove_bid, remove_ask;  // c^b_i, c^a_i
    std::vector<std::int64_t> events;                  // orders used by the sigma estimator, both sides
    std::vector<double> sum_sq;                        // pooled sum of (size / unit)^2
    std::vector<double> laplacian;                     // time-averaged, both sides pooled
    std::vector<double> mean_bid, mean_ask;            // time-averaged profiles in model units
    std::uint64_t rows = 0;
    std::uint64_t groups = 0;
    std::uint64_t excluded_unoccupied = 0;
    std::uint64_t outside_grid = 0;
    std::uint64_t ignored_type = 0;  // types 6 and 7
    double p0 = 0.0, p1 = 0.0;       // ticks
    double price_qv = 0.0;           // ticks^2
    std::uint64_t price_changes = 0;
    std::uint64_t multi_tick_changes = 0;
    double delta_raw = 0.0;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// Streaming estimator. Rows sharing a timestamp are treated as one group:
// relative levels come from the group's final book, occupancy from the
// previous group's final book, so results do not depend on row order inside
// a timestamp.
class CalibrationAccumulator {
public:
    explicit CalibrationAccumulator(CalibrationSettings settings);

    void add(const LobsterMessage& message, const BookRow& row);
    EstimateSet finish();

private:
    struct Dense {
        std::vector<double> bid, ask;  // shares by relative level
        long long bid1 = 0, ask1 = 0;  // level-1 prices
        bool has_bid = false, has_ask = false;
    };
    Dense densify(const BookRow& row) const;
    long long size_at(const BookRow& row, long long price, int direction) const;
    void close_group();
    void accumulate_book(const Dense& d, double w);

    CalibrationSettings s_;
    std::vector<LobsterMessage> group_msgs_;
    BookRow group_row_;
    BookRow prev_row_;
    bool have_prev_ = false;
    double group_time_ = 0.0;

    // Running sums.
    std::vector<std::int64_t> d_bid_, d_ask_, c_bid_, c_ask_, events_;
    std::vector<double> sum_sq_;
    std::vector<double> lap_sum_, bid_sum_, ask_sum_;
    double weight_sum_ = 0.0;
    double imb_sum_ = 0.0, abs_imb_sum_ = 0.0;
    Dense last_dense_;
    bool have_last_ = false;
    double last_time_ = 0.0;
    double last_price_ = 0.0;
    bool have_price_ = false;
    double p0_ = 0.0;
    double qv_ = 0.0;
    std::uint64_t changes_ = 0, multi_ = 0;
    std::uint64_t rows_ = 0, groups_ = 0, excluded_ = 0, outside_ = 0, ignored_ = 0;
    double first_time_ = 0.0;
};

EstimateSet calibrate(std::istream& messages, std::istream& book, int levels, const CalibrationSettings& s);
EstimateSet calibrate(const LobsterData& data, const CalibrationSettings& s);

// Report (JSON) and per-level CSV.
void write_estimates(const EstimateSet& e, const std::filesystem::path& json_path,
                     const std::filesystem::path& csv_path);

} // namespace lobsim::calibration
