#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "lobsim/calibration/estimators.hpp"
#include "lobsim/calibration/synthetic.hpp"
#include "lobsim/core/book.hpp"
#include "lobsim/core/coefficients.hpp"
#include "lobsim/core/price_change.hpp"
#include "lobsim/core/regeneration.hpp"
#include "lobsim/macro/macro_sim.hpp"
#include "lobsim/meso/meso_sim.hpp"
#include "lobsim/micro/micro_sim.hpp"
#include "lobsim/validation/cross_scale.hpp"

namespace lobsim::io {

struct MicroSection {
    double n = 1e4;
    double horizon = 1.0;
    std::uint64_t event_cap = 100'000'000;
    std::vector<double> snapshots;
};

struct MesoSection {
    double horizon = 1.0;
    double dt = 0.0;  // 0 picks default_meso_dt
    meso::CoefficientScaling scaling = meso::CoefficientScaling::plain;
    std::vector<double> snapshots;
};

struct SyntheticSection {
    double volume_unit = 100.0;
    double flush_fraction = 0.5;
    std::int64_t max_age_steps = 150;
    long long tick = 100;
    long long start_mid_ticks = 13600;
    double start_seconds = 39600.0;
};

// Everything an INI file can set. Missing keys keep these defaults; unknown
// sections or keys are errors.
struct RunConfig {
    GridSpec grid;
    CoefficientSet coeffs;
    PriceChangeSpec price;
    RegenerationRule regeneration = RegenerationRule::shift(1);
    bool price_dynamics = true;
    macro::SchemeParams scheme;
    MicroSection micro;
    MesoSection meso;
    Profile initial_bid = Profile::constant(1.0);
    Profile initial_ask = Profile::constant(1.0);
    double initial_mid = 0.0;
    calibration::CalibrationSettings calibration;
    SyntheticSection synthetic;
    validation::LadderConfig ladder;
    bool has_ladder = false;
    std::uint64_t seed = 1;
    int ensemble = 1;

    std::string source;  // raw text, hashed into the manifest

    macro::MacroModel macro_model() const;
    meso::MesoModel meso_model() const;
    micro::MicroModel micro_model() const;
    calibration::SyntheticSpec synthetic_spec() const;
    // Initial profiles sampled at the interior levels of `grid`.
    RealBook initial_book() const;
};

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

} // namespace lobsim::io
