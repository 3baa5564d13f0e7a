#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "lobsim/core/grid.hpp"
#include "lobsim/rng.hpp"

namespace lobsim {

// New profiles after a price change. `shift` moves both profiles by `bins`
// levels in the direction of the jump, zero-filling bins with no source.
struct RegenerationRule {
    enum class Kind { shift, identity, custom };
    using Sampler = std::function<void(std::vector<double>& bid, std::vector<double>& ask, Direction, Rng&)>;

    Kind kind = Kind::shift;
    int bins = 1;
    Sampler sampler;

    static RegenerationRule shift(int bins = 1) { return {Kind::shift, bins, {}}; }
    static RegenerationRule identity() { return {Kind::identity, 0, {}}; }
    static RegenerationRule custom(Sampler s) { return {Kind::custom, 0, std::move(s)}; }
};

// Shift toward higher level indices (away from the mid) by k, zero-filling.
template <class T>
void shift_away(std::vector<T>& v, int k) {
    const int n = static_cast<int>(v.size());
    k = std::min(k, n);
    std::move_backward(v.begin(), v.end() - k, v.end());
    std::fill(v.begin(), v.begin() + k, T{});
}

// Shift toward the mid by k; the far bins are zeroed.
template <class T>
void shift_toward(std::vector<T>& v, int k) {
    const int n = static_cast<int>(v.size());
    k = std::min(k, n);
    std::move(v.begin() + k, v.end(), v.begin());
    std::fill(v.end() - k, v.end(), T{});
}

// Up move: the bid side gains an empty best level, the ask side's best level
// is consumed. Down move is the mirror image.
template <class T>
void apply_shift(std::vector<T>& bid, std::vector<T>& ask, Direction d, int bins) {
    if (d == Direction::up) {
        shift_away(bid, bins);
        shift_toward(ask, bins);
    } else {
        shift_toward(bid, bins);
        shift_away(ask, bins);
    }
}

// Real-valued profiles.
void regenerate(std::vector<double>& bid, std::vector<double>& ask, Direction d,
                const RegenerationRule& rule, Rng& rng);

// Integer profiles at scale n: shift and identity act exactly; a custom
// sampler acts on the volume/sqrt(n) image and is rounded back.
void regenerate(std::vector<long long>& bid, std::vector<long long>& ask, Direction d,
                const RegenerationRule& rule, Rng& rng, double n);

} // namespace lobsim
