#include "lobsim/io/csv.hpp"

namespace lobsim::io {

std::ofstream open_csv(const std::filesystem::path& path, const std::vector<std::string>& header_comments,
                       const std::string& columns) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& c : header_comments) out << "# " << c << '\n';
    out << columns << '\n';
    return out;
}

void write_price_series(const std::filesystem::path& path, std::span<const double> times,
                        std::span<const double> prices, const std::string& time_unit) {
    if (times.size() != prices.size()) throw DataError("price series: length mismatch");
    auto out = open_csv(path, {"time in " + time_unit, "price in currency units"}, "time,price");
    out.precision(12);
    for (std::size_t i = 0; i < times.size(); ++i) out << times[i] << ',' << prices[i] << '\n';
    if (!out) throw DataError("cannot write " + path.string());
}

void write_price_events(const std::filesystem::path& path, std::span<const PriceEvent> events,
                        const std::string& time_unit) {
    auto out = open_csv(path, {"time in " + time_unit, "mid in currency units after the change"}, "time,direction,mid");
    out.precision(12);
    for (const auto& e : events) out << e.time << ',' << to_string(e.direction) << ',' << e.new_mid << '\n';
    if (!out) throw DataError("cannot write " + path.string());
}

void write_events(const std::filesystem::path& path, std::span<const micro::EventRecord> events,
                  const std::string& time_unit) {
    auto out = open_csv(path, {"time in " + time_unit, "level counted from the mid; left/right move one share one level"},
                        "time,side,level,kind");
    out.precision(12);
    static constexpr const char* kinds[] = {"add", "remove", "left", "right"};
    for (const auto& e : events)
        out << e.time << ',' << to_string(e.side) << ',' << e.level << ',' << kinds[static_cast<int>(e.kind)] << '\n';
    if (!out) throw DataError("cannot write " + path.string());
}

void write_profile(const std::filesystem::path& path, const GridSpec& grid, const RealBook& book,
                   const std::string& what) {
    auto out = open_csv(path, {"position = level / N on [0,1]", what}, "level,position,bid,ask");
    out.precision(12);
    for (int i = 0; i < book.levels(); ++i)
        out << i + 1 << ',' << grid.position(i + 1) << ',' << book.bid[static_cast<std::size_t>(i)] << ','
            << book.ask[static_cast<std::size_t>(i)] << '\n';
    if (!out) throw DataError("cannot write " + path.string());
}

} // namespace lobsim::io
