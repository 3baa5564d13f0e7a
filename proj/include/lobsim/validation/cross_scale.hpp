#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lobsim/core/coefficients.hpp"
#include "lobsim/core/price_change.hpp"
#include "lobsim/core/profile.hpp"
#include "lobsim/core/regeneration.hpp"

namespace lobsim::validation {

enum class LadderKind {
    trivial,     // the same mesoscopic ensemble twice
    micro_meso,  // rescaled micro at n in `rungs` vs the mesoscopic model
    meso_macro   // lattice-scaled meso at N in `rungs` vs a fine macroscopic reference
};

LadderKind parse_ladder_kind(const std::string& name);
std::string to_string(LadderKind kind);

struct LadderConfig {
    LadderKind kind = LadderKind::trivial;
    CoefficientSet coeffs;
    PriceChangeSpec price;
    bool price_dynamics = false;
    RegenerationRule regeneration = RegenerationRule::shift(1);

    int num_ticks = 4;                 // grid of the trivial and micro_meso ladders
    std::vector<double> rungs;         // n values or N values, coarse to fine
    std::vector<double> checkpoints;   // times at which marginals are compared
    std::vector<double> positions;     // meso_macro: interior points x
    Profile initial_bid = Profile::constant(1.0);
    Profile initial_ask = Profile::constant(1.0);

    std::size_t paths = 2000;
    double meso_dt = 1e-3;             // step of the mesoscopic reference (micro_meso, trivial)
    double meso_lattice_dt = 0.05;     // meso_macro: meso step in meso time units
    int reference_ticks = 160;         // meso_macro: N of the macroscopic reference
    double reference_ratio = 0.4;      // meso_macro: target 2 alpha dt N^2 of the reference
    std::vector<std::uint64_t> seeds{1, 2, 3};
    double significance = 0.01;
    int seeds_required = 2;
    std::uint64_t event_budget = 10'000'000;  // per micro path

    void validate() const;
};

struct CellResult {
    std::uint64_t seed = 0;
    double rung = 0.0;
    double time = 0.0;
    std::string coordinate;
    double statistic = 0.0;
    double p_value = 1.0;
};

struct RungSummary {
    double rung = 0.0;
    double mean_statistic = 0.0;
    double min_p_value = 1.0;
    // Bonferroni: min(1, cells * min p), a level-correct p-value for "all
    // marginals of this rung agree".
    double family_p_value = 1.0;
    bool complete = true;
};

struct SeedVerdict {
    std::uint64_t seed = 0;
    std::vector<RungSummary> rungs;
    bool monotone = false;        // mean statistic strictly decreasing along the ladder
    bool terminal_pass = false;   // family p-value of the last rung above significance
    bool pass = false;
};

struct CrossScaleReport {
    LadderKind kind = LadderKind::trivial;
    std::vector<CellResult> cells;
    std::vector<SeedVerdict> seeds;
    int seeds_passed = 0;
    bool pass = false;
    bool incomplete = false;
    std::vector<std::string> notes;

    nlohmann::json to_json() const;
    std::string to_text() const;
    void write_csv(const std::filesystem::path& path) const;
};

CrossScaleReport cross_scale_report(const LadderConfig& config);

} // namespace lobsim::validation
