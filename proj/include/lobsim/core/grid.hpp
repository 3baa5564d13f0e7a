#pragma once

#include <string_view>

namespace lobsim {

enum class Side { bid, ask };
enum class Direction { up, down };

constexpr std::string_view to_string(Side s) { return s == Side::bid ? "bid" : "ask"; }
constexpr std::string_view to_string(Direction d) { return d == Direction::up ? "u" : "d"; }

// Relative price grid {0, 1, ..., N}; levels 1..N-1 carry volume, 0 and N are
// pinned to zero. Level i sits at position i/N on [0,1].
struct GridSpec {
    int num_ticks = 50;       // N
    double tick_size = 0.01;  // currency per tick
    double jump_size = 0.01;  // currency per price change

    int interior() const { return num_ticks - 1; }
    double position(int level) const { return static_cast<double>(level) / num_ticks; }
    // Price jump expressed in grid bins.
    int shift_bins() const;
    void validate() const;
};

} // namespace lobsim
