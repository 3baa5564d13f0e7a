#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace lobsim::calibration {

// LOBSTER sentinel prices for empty book slots.
inline constexpr long long kEmptyAskPrice = 9999999999LL;
inline constexpr long long kEmptyBidPrice = -9999999999LL;

struct LobsterMessage {
    double time = 0.0;  // seconds after midnight
    int type = 0;       // 1 submit, 2 partial cancel, 3 delete, 4 visible exec, 5 hidden exec, 6 cross, 7 halt
    long long order_id = 0;
    long long size = 0;
    long long price = 0;  // dollars * 10^4
    int direction = 0;    // +1 buy limit order, -1 sell limit order
};

// One order book row: L levels of (ask px, ask size, bid px, bid size).
struct BookRow {
    std::vector<long long> ask_price, ask_size, bid_price, bid_size;

    BookRow() = default;
    explicit BookRow(int levels)
        : ask_price(static_cast<std::size_t>(levels)), ask_size(static_cast<std::size_t>(levels)),
          bid_price(static_cast<std::size_t>(levels)), bid_size(static_cast<std::size_t>(levels)) {}
    int levels() const { return static_cast<int>(ask_price.size()); }
    bool operator==(const BookRow&) const = default;
};

// Single-line parsers; `line_no` only feeds error messages.
LobsterMessage parse_message_line(std::string_view line, std::size_t line_no);
BookRow parse_book_line(std::string_view line, int levels, std::size_t line_no);

std::string format_message_line(const LobsterMessage& m);
std::string format_book_line(const BookRow& row);
void append_book_line(std::string& out, const BookRow& row);

// Streams row-aligned message/orderbook pairs. Throws DataError on malformed
// rows (with file and line number) and when one file ends before the other.
class LobsterReader {
public:
    LobsterReader(std::istream& messages, std::istream& book, int levels);

    bool next(LobsterMessage& message, BookRow& row);
    std::size_t rows() const { return line_; }

private:
    std::istream* messages_;
    std::istream* book_;
    int levels_;
    std::size_t line_ = 0;
    std::string msg_line_, book_line_;
};

struct LobsterData {
    std::vector<LobsterMessage> messages;
    std::vector<BookRow> book;
};

LobsterData parse_lobster(std::istream& messages, std::istream& book, int levels);
LobsterData parse_lobster(const std::filesystem::path& messages, const std::filesystem::path& book, int levels);

// Number of levels implied by the column count of the first orderbook row.
// DataError for a missing or empty file.
int detect_levels(const std::filesystem::path& book);

} // namespace lobsim::calibration
