#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lobsim/core/book.hpp"
#include "lobsim/core/coefficients.hpp"
#include "lobsim/core/price_change.hpp"
#include "lobsim/core/regeneration.hpp"
#include "lobsim/core/stencil_tables.hpp"
#include "lobsim/rng.hpp"

namespace lobsim::meso {

// `plain` evaluates h(i/N, x) and sigma(i/N, x) directly. `lattice` uses the
// coarse-graining scalings h^N = N^{-3/2} h(i/N, x/sqrt N) and
// sigma^N = sigma(i/N, x/sqrt N), which is what the meso-to-macro comparison runs.
enum class CoefficientScaling { plain, lattice };

struct MesoModel {
    GridSpec grid;
    CoefficientSet coeffs;
    PriceChangeSpec price;
    RegenerationRule regeneration = RegenerationRule::shift(1);
    CoefficientScaling scaling = CoefficientScaling::plain;
    bool price_dynamics = true;

    void validate() const;
    StencilScaling stencil_scaling(double dt) const;
};

struct MesoState {
    RealBook book;
    // Accumulated reflection per level and side.
    std::vector<double> ledger_bid;
    std::vector<double> ledger_ask;

    MesoState() = default;
    explicit MesoState(RealBook b);
    std::vector<double>& ledger(Side s) { return s == Side::bid ? ledger_bid : ledger_ask; }
    const std::vector<double>& ledger(Side s) const { return s == Side::bid ? ledger_bid : ledger_ask; }
};

// Reusable projected Euler-Maruyama stepper. Tables are rebuilt only when dt
// or (with a mid hook) the mid changes.
class MesoStepper {
public:
    explicit MesoStepper(const MesoModel& model);

    // One step of both sides; last_push() then holds the step's reflection
    // increments.
    void step(MesoState& state, double dt, Rng& rng);

    std::span<const double> last_push(Side s) const { return s == Side::bid ? push_bid_ : push_ask_; }

private:
    void ensure_tables(double dt, double mid);

    const MesoModel* model_;
    double table_dt_ = -1.0;
    double table_mid_ = 0.0;
    simd::StencilTables bid_tables_, ask_tables_;
    std::vector<double> z_, out_, push_bid_, push_ask_;
};

void step_meso(MesoState& state, const MesoModel& model, double dt, Rng& rng);

struct MesoSnapshot {
    double time = 0.0;
    RealBook book;
};

struct MesoOptions {
    std::vector<double> snapshot_times;
    // Starting clock state (thresholds and accumulators); fresh if empty.
    std::optional<PriceClock> clock;
};

struct MesoPath {
    std::vector<MesoSnapshot> snapshots;
    std::vector<PriceEvent> price_events;
    MesoState final_state;
    std::int64_t steps = 0;
    double dt = 0.0;
};

// Evolves to `horizon` in steps of size horizon / round(horizon / dt).
// Per step: accumulate theta * dt on the price clocks (theta at the start of
// the step), fire at most one price change, then take the field step.
MesoPath simulate_meso_dynamic(const MesoState& init, const MesoModel& model, double horizon, double dt, Rng& rng,
                               const MesoOptions& options = {});

// Default step used when the configuration does not set one.
inline double default_meso_dt(double horizon) { return horizon / 1e5; }

} // namespace lobsim::meso
