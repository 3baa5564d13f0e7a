#include "lobsim/core/grid.hpp"

#include <cmath>
#include <string>

#include "lobsim/error.hpp"

namespace lobsim {

int GridSpec::shift_bins() const { return static_cast<int>(std::lround(jump_size / tick_size)); }

void GridSpec::validate() const {
    if (num_ticks < 2) throw ConfigError("grid: num_ticks must be >= 2, got " + std::to_string(num_ticks));
    if (!(tick_size > 0.0)) throw ConfigError("grid: tick_size must be positive");
    if (!(jump_size > 0.0)) throw ConfigError("grid: jump_size must be positive");
    const double ratio = jump_size / tick_size;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1.0)
        throw ConfigError("grid: jump_size must be a positive integer multiple of tick_size");
}

} // namespace lobsim
