#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lobsim/core/book.hpp"
#include "lobsim/core/coefficients.hpp"
#include "lobsim/core/price_change.hpp"
#include "lobsim/core/regeneration.hpp"
#include "lobsim/rng.hpp"
#include "lobsim/simd/stencil.hpp"

namespace lobsim::macro {

struct MacroModel {
    GridSpec grid;
    CoefficientSet coeffs;
    PriceChangeSpec price{0.0, 1.0, 0.02};
    RegenerationRule regeneration = RegenerationRule::shift(1);
    bool price_dynamics = true;

    void validate() const;
};

// Horizon T (minutes) split into M steps of the space grid with N = grid.num_ticks.
struct SchemeParams {
    double horizon = 60.0;
    std::int64_t steps = 1'500'000;
    bool allow_unstable = false;
    // 0 means every steps / 5.
    std::int64_t snapshot_every = 0;

    double dt() const { return horizon / static_cast<double>(steps); }
    void validate() const;
};

// 2 alpha T N^2 / M with the larger of the two alphas.
double stability_ratio(const MacroModel& model, const SchemeParams& params);

// u^b, u^a at x_i = i/N, i = 1..N-1, and the price (book.mid).
struct MacroField {
    RealBook book;
    std::int64_t step = 0;
};

enum class Jump { none, up, down };

struct JumpProbabilities {
    double up = 0.0;
    double down = 0.0;
};

JumpProbabilities jump_probabilities(const MacroField& field, const MacroModel& model, const SchemeParams& params);

// Draws one uniform (or uses `forced_uniform`) and applies the jump, if any.
// Throws NumericalError when the two probabilities sum past one.
Jump price_update(MacroField& field, const MacroModel& model, const SchemeParams& params, Rng& rng,
                  std::optional<double> forced_uniform = std::nullopt);

class MacroStepper {
public:
    MacroStepper(const MacroModel& model, const SchemeParams& params);

    void field_step(MacroField& field, Rng& rng);

    // Buffers of the last field step, for property checks.
    std::span<const double> last_noise(Side s) const { return s == Side::bid ? z_bid_ : z_ask_; }
    std::span<const double> last_clip(Side s) const { return s == Side::bid ? clip_bid_ : clip_ask_; }
    const simd::StencilTables& tables(Side s) const { return s == Side::bid ? bid_tables_ : ask_tables_; }

private:
    void ensure_tables(double mid);

    const MacroModel* model_;
    SchemeParams params_;
    bool built_ = false;
    double table_mid_ = 0.0;
    simd::StencilTables bid_tables_, ask_tables_;
    std::vector<double> z_bid_, z_ask_, clip_bid_, clip_ask_, out_;
};

void field_step(MacroField& field, const MacroModel& model, const SchemeParams& params, Rng& rng);

struct PricePoint {
    double time = 0.0;
    double price = 0.0;
};

struct MacroSnapshot {
    double time = 0.0;
    RealBook book;
};

struct MacroOptions {
    // Extra snapshot times on top of the regular cadence.
    std::vector<double> snapshot_times;
    bool regular_snapshots = true;
};

struct MacroResult {
    std::vector<MacroSnapshot> snapshots;
    // Initial price followed by one point per jump.
    std::vector<PricePoint> price_path;
    RealBook average_profile;  // time average of the field over all steps
    MacroField final_field;
    std::int64_t up_jumps = 0;
    std::int64_t down_jumps = 0;
    double quadratic_variation = 0.0;  // sum of squared price increments (currency^2)
    double max_clip = 0.0;
    double total_clip = 0.0;

    std::int64_t jumps() const { return up_jumps + down_jumps; }
};

// M iterations of price_update followed by field_step.
MacroResult simulate_macro(const MacroField& init, const MacroModel& model, const SchemeParams& params, Rng& rng,
                           const MacroOptions& options = {});

} // namespace lobsim::macro
