#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "lobsim/core/book.hpp"
#include "lobsim/core/price_change.hpp"
#include "lobsim/error.hpp"
#include "lobsim/micro/micro_sim.hpp"

namespace lobsim::io {

// Every file starts with '#' lines naming the units of each column.
std::ofstream open_csv(const std::filesystem::path& path, const std::vector<std::string>& header_comments,
                       const std::string& columns);

// time (model units), price (currency).
void write_price_series(const std::filesystem::path& path, std::span<const double> times,
                        std::span<const double> prices, const std::string& time_unit);

// One row per price change: time, direction (u/d), new mid.
void write_price_events(const std::filesystem::path& path, std::span<const PriceEvent> events,
                        const std::string& time_unit);

// One row per snapshot: time, bid_1..bid_L, ask_1..ask_L.
template <class Snapshots>
void write_snapshots(const std::filesystem::path& path, const Snapshots& snaps, int levels,
                     const std::string& time_unit, const std::string& volume_unit) {
    std::string cols = "time";
    for (const char* side : {"bid", "ask"})
        for (int i = 1; i <= levels; ++i) cols += "," + std::string(side) + "_" + std::to_string(i);
    auto out = open_csv(path, {"time in " + time_unit, "volume in " + volume_unit + "; column i is level i from the mid"},
                        cols);
    out.precision(12);
    for (const auto& s : snaps) {
        out << s.time;
        for (Side side : {Side::bid, Side::ask})
            for (const auto v : s.book.side(side)) out << ',' << v;
        out << '\n';
    }
    if (!out) throw DataError("cannot write " + path.string());
}

// time, side, level, kind (add, remove, left, right).
void write_events(const std::filesystem::path& path, std::span<const micro::EventRecord> events,
                  const std::string& time_unit);

// level, position, bid, ask. Also used for the meso reflection ledgers.
void write_profile(const std::filesystem::path& path, const GridSpec& grid, const RealBook& book,
                   const std::string& what);

} // namespace lobsim::io
