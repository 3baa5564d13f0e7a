#pragma once

#include <vector>

#include "lobsim/core/grid.hpp"

namespace lobsim {

// Volume profiles on levels 1..N-1 of both sides (index 0 is level 1).
// Integer volumes at micro scale, nonnegative reals at meso scale.
template <class Volume>
struct DiscreteBook {
    std::vector<Volume> bid;
    std::vector<Volume> ask;
    double mid = 0.0;

    DiscreteBook() = default;
    DiscreteBook(std::vector<Volume> b, std::vector<Volume> a, double m = 0.0)
        : bid(std::move(b)), ask(std::move(a)), mid(m) {}
    // One argument only, so that Book({1}, {0}) means two one-level profiles.
    explicit DiscreteBook(int levels)
        : bid(static_cast<std::size_t>(levels), Volume{}), ask(static_cast<std::size_t>(levels), Volume{}) {}

    int levels() const { return static_cast<int>(bid.size()); }
    std::vector<Volume>& side(Side s) { return s == Side::bid ? bid : ask; }
    const std::vector<Volume>& side(Side s) const { return s == Side::bid ? bid : ask; }

    bool operator==(const DiscreteBook&) const = default;
};

using MicroBook = DiscreteBook<long long>;
using RealBook = DiscreteBook<double>;

} // namespace lobsim
