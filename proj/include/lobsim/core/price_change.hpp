#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lobsim/core/grid.hpp"
#include "lobsim/rng.hpp"

namespace lobsim {

// theta_u = gamma * max(I, 0) + delta, theta_d = gamma * max(-I, 0) + delta,
// where I is the bid-minus-ask mass over [0, window].
struct PriceChangeSpec {
    double gamma = 0.0;
    double delta = 1.0;
    double window = 0.02;  // on [0,1]
    bool allow_zero_delta = false;

    void validate() const;
};

struct ThetaRates {
    double up = 0.0;
    double down = 0.0;

    double total() const { return up + down; }
};

// Integral over [0, window] of the piecewise-linear interpolant through
// (0, 0), (i/N, value(i)) for i = 1..N-1, and (1, 0).
template <class ValueAt>
double integrate_window(ValueAt&& value, int num_ticks, double window) {
    const double scaled = window * num_ticks;
    double whole = std::floor(scaled);
    double frac = scaled - whole;
    if (frac > 1.0 - 1e-9) {
        whole += 1.0;
        frac = 0.0;
    } else if (frac < 1e-9) {
        frac = 0.0;
    }
    const int full = static_cast<int>(whole);
    auto node = [&](int i) { return (i <= 0 || i >= num_ticks) ? 0.0 : static_cast<double>(value(i)); };
    const double h = 1.0 / num_ticks;
    double sum = 0.0;
    for (int j = 0; j < full; ++j) sum += 0.5 * (node(j) + node(j + 1)) * h;
    if (frac > 0.0) {
        const double a = node(full);
        const double b = node(full + 1);
        sum += frac * h * (a + 0.5 * frac * (b - a));
    }
    return sum;
}

double window_imbalance(std::span<const double> bid, std::span<const double> ask, int num_ticks,
                        double window);

ThetaRates theta_from_imbalance(double imbalance, const PriceChangeSpec& spec);

ThetaRates theta_rates(std::span<const double> bid, std::span<const double> ask, int num_ticks,
                       const PriceChangeSpec& spec);

// Accumulated hazard integrals against unit-exponential thresholds.
struct PriceClock {
    double acc_up = 0.0;
    double acc_down = 0.0;
    double threshold_up = 1.0;
    double threshold_down = 1.0;

    static PriceClock fresh(Rng& rng) {
        PriceClock c;
        c.reset(rng);
        return c;
    }
    void reset(Rng& rng) {
        acc_up = acc_down = 0.0;
        threshold_up = draw_exponential(rng);
        threshold_down = draw_exponential(rng);
    }
};

struct PriceEvent {
    double time = 0.0;
    Direction direction = Direction::up;
    double new_mid = 0.0;
    std::vector<double> bid;  // profiles just before the change
    std::vector<double> ask;
};

} // namespace lobsim
