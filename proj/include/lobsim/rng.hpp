#pragma once

#include <array>
#include <cstdint>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace lobsim {

using Rng = std::mt19937_64;

// One independent stream per (seed, stream id). Runs in an ensemble use the
// run index as stream id so results do not depend on scheduling.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6c6f6273u};
    return Rng(seq);
}

// Boost distributions give the same draws on every standard library; the
// <random> ones do not. All three are stateless, so locals are fine.
inline double draw_normal(Rng& rng) {
    boost::random::normal_distribution<double> dist;
    return dist(rng);
}

inline double draw_exponential(Rng& rng) {
    boost::random::exponential_distribution<double> dist;
    return dist(rng);
}

inline double draw_uniform(Rng& rng) {
    boost::random::uniform_01<double> dist;
    return dist(rng);
}

} // namespace lobsim
