#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>

#include "lobsim/calibration/lobster.hpp"
#include "lobsim/macro/macro_sim.hpp"

namespace lobsim::calibration {

// LOBSTER-format order flow generated from a macroscopic run. The book file
// lists every grid price (zero sizes included) with a two-tick spread, so
// relative level i of the data is grid level i of the model.
//
// Each level and side accumulates the noise increment xi of the scheme and
// is flushed when |xi| or the gap between field and book reaches
// `flush_fraction` of its queue (at least one share), when `max_age_steps`
// have passed, or just before a price change.
// A flush emits one order of size round(|xi| * volume_unit) and unit-size
// orders for the rest of the volume change, so squared sizes track the noise
// and order counts track the drift.
struct SyntheticSpec {
    macro::MacroModel model;
    macro::SchemeParams scheme;
    RealBook initial;                 // model units
    double volume_unit = 100.0;       // shares per model unit in the files
    double flush_fraction = 0.5;
    std::int64_t max_age_steps = 150;
    long long tick = 100;             // price units per tick
    long long start_mid_ticks = 13600;
    double start_seconds = 39600.0;   // 11:00:00
    double seconds_per_unit = 60.0;   // model time is in minutes
};

struct SyntheticSummary {
    std::uint64_t rows = 0;
    std::int64_t up_jumps = 0;
    std::int64_t down_jumps = 0;
    double mean_imbalance = 0.0;      // time average of the window imbalance
    double mean_abs_imbalance = 0.0;
};

using RowSink = std::function<void(const LobsterMessage&, const BookRow&)>;

SyntheticSummary generate_synthetic(const SyntheticSpec& spec, Rng& rng, const RowSink& sink);

// Writes <stem>_message.csv and <stem>_orderbook.csv into `dir`.
SyntheticSummary write_synthetic(const SyntheticSpec& spec, Rng& rng, const std::filesystem::path& dir,
                                 const std::string& stem = "synthetic");

} // namespace lobsim::calibration
