#include "lobsim/calibration/lobster.hpp"

#include <charconv>
#include <cmath>

#include "lobsim/error.hpp"

namespace lobsim::calibration {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

class FieldCursor {
public:
    FieldCursor(std::string_view line, const char* file, std::size_t line_no)
        : rest_(trim(line)), file_(file), line_no_(line_no) {}

    std::string_view field() {
        if (done_) fail("too few columns");
        const auto comma = rest_.find(',');
        std::string_view f = rest_.substr(0, comma);
        if (comma == std::string_view::npos) {
            done_ = true;
            rest_ = {};
        } else {
            rest_.remove_prefix(comma + 1);
        }
        return trim(f);
    }

    long long integer() {
        const std::string_view f = field();
        long long v = 0;
        const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || p != f.data() + f.size()) fail("'" + std::string(f) + "' is not an integer");
        return v;
    }

    double real() {
        const std::string_view f = field();
        double v = 0;
        const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v))
            fail("'" + std::string(f) + "' is not a number");
        return v;
    }

    void finish() {
        if (!done_) fail("too many columns");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(std::string(file_) + " line " + std::to_string(line_no_) + ": " + what);
    }

private:
    std::string_view rest_;
    const char* file_;
    std::size_t line_no_;
    bool done_ = false;
};

void append_int(std::string& out, long long v) {
    char buf[24];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
}

} // namespace

LobsterMessage parse_message_line(std::string_view line, std::size_t line_no) {
    FieldCursor c(line, "message file", line_no);
    LobsterMessage m;
    m.time = c.real();
    m.type = static_cast<int>(c.integer());
    m.order_id = c.integer();
    m.size = c.integer();
    m.price = c.integer();
    m.direction = static_cast<int>(c.integer());
    c.finish();
    if (m.type < 1 || m.type > 7) c.fail("event type " + std::to_string(m.type) + " outside 1..7");
    if (m.direction != 1 && m.direction != -1) c.fail("direction must be 1 or -1");
    if (m.size < 0) c.fail("negative size");
    return m;
}

BookRow parse_book_line(std::string_view line, int levels, std::size_t line_no) {
    FieldCursor c(line, "orderbook file", line_no);
    BookRow row(levels);
    for (std::size_t l = 0; l < static_cast<std::size_t>(levels); ++l) {
        row.ask_price[l] = c.integer();
        row.ask_size[l] = c.integer();
        row.bid_price[l] = c.integer();
        row.bid_size[l] = c.integer();
        if (row.ask_size[l] < 0 || row.bid_size[l] < 0) c.fail("negative size at level " + std::to_string(l + 1));
    }
    c.finish();
    return row;
}

std::string format_message_line(const LobsterMessage& m) {
    char time_buf[48];
    const auto r = std::to_chars(time_buf, time_buf + sizeof time_buf, m.time, std::chars_format::fixed, 9);
    std::string out(time_buf, r.ptr);
    for (long long v : {static_cast<long long>(m.type), m.order_id, m.size, m.price, static_cast<long long>(m.direction)}) {
        out.push_back(',');
        append_int(out, v);
    }
    return out;
}

void append_book_line(std::string& out, const BookRow& row) {
    for (std::size_t l = 0; l < row.ask_price.size(); ++l) {
        if (l > 0) out.push_back(',');
        append_int(out, row.ask_price[l]);
        out.push_back(',');
        append_int(out, row.ask_size[l]);
        out.push_back(',');
        append_int(out, row.bid_price[l]);
        out.push_back(',');
        append_int(out, row.bid_size[l]);
    }
}

std::string format_book_line(const BookRow& row) {
    std::string out;
    append_book_line(out, row);
    return out;
}

LobsterReader::LobsterReader(std::istream& messages, std::istream& book, int levels)
    : messages_(&messages), book_(&book), levels_(levels) {
    if (levels < 1) throw ConfigError("lobster: number of levels must be >= 1");
}

bool LobsterReader::next(LobsterMessage& message, BookRow& row) {
    auto read = [](std::istream& in, std::string& line) {
        while (std::getline(in, line))
            if (!trim(line).empty()) return true;
        return false;
    };
    const bool have_msg = read(*messages_, msg_line_);
    const bool have_book = read(*book_, book_line_);
    if (have_msg != have_book)
        throw DataError("lobster: files are misaligned; " + std::string(have_msg ? "orderbook" : "message") +
                        " file ends after " + std::to_string(line_) + " rows");
    if (!have_msg) return false;
    ++line_;
    message = parse_message_line(msg_line_, line_);
    row = parse_book_line(book_line_, levels_, line_);
    return true;
}

LobsterData parse_lobster(std::istream& messages, std::istream& book, int levels) {
    LobsterReader reader(messages, book, levels);
    LobsterData data;
    LobsterMessage m;
    BookRow r;
    while (reader.next(m, r)) {
        data.messages.push_back(m);
        data.book.push_back(std::move(r));
    }
    return data;
}

LobsterData parse_lobster(const std::filesystem::path& messages, const std::filesystem::path& book, int levels) {
    std::ifstream m(messages), b(book);
    if (!m) throw DataError("cannot open message file " + messages.string());
    if (!b) throw DataError("cannot open orderbook file " + book.string());
    return parse_lobster(m, b, levels);
}

int detect_levels(const std::filesystem::path& book) {
    std::ifstream in(book);
    if (!in) throw DataError("cannot open orderbook file " + book.string());
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        std::size_t cols = 1;
        for (char ch : t) cols += ch == ',';
        if (cols % 4 != 0) throw DataError("orderbook file line 1: column count " + std::to_string(cols) + " is not a multiple of 4");
        return static_cast<int>(cols / 4);
    }
    throw DataError("orderbook file " + book.string() + " has no rows");
}

} // namespace lobsim::calibration
