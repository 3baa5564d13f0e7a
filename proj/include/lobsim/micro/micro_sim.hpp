#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lobsim/core/book.hpp"
#include "lobsim/core/coefficients.hpp"
#include "lobsim/core/price_change.hpp"
#include "lobsim/core/regeneration.hpp"
#include "lobsim/rng.hpp"

namespace lobsim::micro {

// Microscopic model at heavy-traffic index n. Coefficients are the limit
// coefficients; the n-scaling is applied when rates are evaluated.
struct MicroModel {
    GridSpec grid;
    CoefficientSet coeffs;
    PriceChangeSpec price;
    RegenerationRule regeneration = RegenerationRule::shift(1);
    double n = 1.0;
    bool price_dynamics = true;

    void validate() const;
};

enum class EventKind : std::uint8_t { add, remove, move_left, move_right };

struct EventRecord {
    double time = 0.0;
    Side side = Side::bid;
    int level = 1;  // 1..N-1
    EventKind kind = EventKind::add;
};

struct StepOutcome {
    enum class Status { book_event, price_event, frozen, horizon };
    Status status = Status::frozen;
    double dt = 0.0;
    EventRecord event;                 // valid for book_event
    std::optional<PriceEvent> price;   // valid for price_event
};

// Gillespie direct method over all level clocks of both sides plus the two
// price clocks. Price intensities are constant between events, so racing
// them alongside the book clocks is exact.
class MicroSimulator {
public:
    MicroSimulator(const MicroModel& model, MicroBook book, double time = 0.0);

    // Samples the next transition and applies it. Returns `frozen` without
    // touching the state when every rate is zero, and `horizon` when the next
    // event would fall after `limit`: the book is unchanged and the clock
    // moves to `limit`. By memorylessness the discarded draw does not bias
    // the continuation from there.
    StepOutcome step(Rng& rng, double limit = std::numeric_limits<double>::infinity());

    const MicroBook& book() const { return book_; }
    double time() const { return time_; }
    double total_rate() const;
    ThetaRates price_rates() const { return theta_; }

private:
    static constexpr int kinds = 4;
    std::size_t channel(int side, int level_index, int kind) const {
        return (static_cast<std::size_t>(side) * levels_ + static_cast<std::size_t>(level_index)) * kinds +
               static_cast<std::size_t>(kind);
    }
    void refresh_level(int side, int level_index);
    void refresh_all();
    void refresh_theta();

    const MicroModel* model_;
    MicroBook book_;
    double time_;
    std::size_t levels_;
    int window_levels_;
    std::vector<double> rates_;
    ThetaRates theta_;
    std::vector<double> scratch_bid_, scratch_ask_;
};

// One transition from `book` (convenience wrapper).
StepOutcome step_micro(MicroBook& book, const MicroModel& model, Rng& rng);

struct Snapshot {
    double time = 0.0;
    RealBook book;
};

struct MicroOptions {
    std::vector<double> snapshot_times;
    std::uint64_t event_cap = 100'000'000;
    bool record_events = false;
};

struct MicroPath {
    double n = 1.0;
    std::vector<EventRecord> events;
    std::vector<Snapshot> snapshots;
    std::vector<PriceEvent> price_events;
    MicroBook final_book;
    double final_time = 0.0;
    std::uint64_t event_count = 0;
    bool frozen = false;
};

// Runs until micro time `horizon` (raw, not rescaled).
MicroPath simulate_micro(const MicroBook& init, const MicroModel& model, double horizon, Rng& rng,
                         const MicroOptions& options = {});

// Time t -> t/n, volume v -> v/sqrt(n); prices unchanged.
MicroPath rescale_path(const MicroPath& path, double n);

// Integer initial data approximating a mesoscopic profile: round(sqrt(n) x).
MicroBook initial_from_meso(const RealBook& book, double n);

} // namespace lobsim::micro
