#include "lobsim/core/price_change.hpp"

#include <algorithm>

#include "lobsim/error.hpp"

namespace lobsim {

void PriceChangeSpec::validate() const {
    if (gamma < 0.0) throw ConfigError("price-change: gamma must be >= 0");
    if (delta < 0.0 || (delta == 0.0 && !allow_zero_delta))
        throw ConfigError("price-change: delta must be > 0 (set allow_zero_delta to freeze the exogenous clock)");
    if (!(window > 0.0)) throw ConfigError("price-change: imbalance window must be positive");
    if (window > 1.0) throw ConfigError("price-change: imbalance window is wider than the domain [0,1]");
}

double window_imbalance(std::span<const double> bid, std::span<const double> ask, int num_ticks,
                        double window) {
    if (window > 1.0) throw ConfigError("price-change: imbalance window is wider than the domain [0,1]");
    return integrate_window([&](int i) { return bid[static_cast<std::size_t>(i - 1)] - ask[static_cast<std::size_t>(i - 1)]; },
                            num_ticks, window);
}

ThetaRates theta_from_imbalance(double imbalance, const PriceChangeSpec& spec) {
    return {spec.gamma * std::max(imbalance, 0.0) + spec.delta, spec.gamma * std::max(-imbalance, 0.0) + spec.delta};
}

ThetaRates theta_rates(std::span<const double> bid, std::span<const double> ask, int num_ticks,
                       const PriceChangeSpec& spec) {
    return theta_from_imbalance(window_imbalance(bid, ask, num_ticks, spec.window), spec);
}

} // namespace lobsim
