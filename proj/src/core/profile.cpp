#include "lobsim/core/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lobsim/error.hpp"

namespace lobsim {

namespace {

double to_double(std::string_view s, const std::string& context) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("cannot parse number '" + std::string(s) + "' in " + context);
    return v;
}

// 1000 intervals put every multiple of 1/N on a knot for N dividing 1000.
constexpr std::size_t kExpKnots = 1001;

} // namespace

Profile::Profile(double constant) : xs_{0.0}, ys_{constant} {}

Profile::Profile(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.empty() || xs_.size() != ys_.size()) throw ConfigError("profile: knots and values must be nonempty and of equal length");
    if (!std::is_sorted(xs_.begin(), xs_.end()) || std::adjacent_find(xs_.begin(), xs_.end()) != xs_.end())
        throw ConfigError("profile: knot positions must be strictly increasing");
}

double Profile::operator()(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto hi = static_cast<std::size_t>(it - xs_.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return ys_[lo] + t * (ys_[hi] - ys_[lo]);
}

double Profile::min_value() const { return *std::min_element(ys_.begin(), ys_.end()); }

Profile Profile::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("profile: cannot open " + path);
    std::vector<double> xs, ys;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'position,value'");
        const std::string ctx = path + ":" + std::to_string(lineno);
        xs.push_back(to_double(std::string_view(line).substr(0, comma), ctx));
        ys.push_back(to_double(std::string_view(line).substr(comma + 1), ctx));
    }
    return Profile(std::move(xs), std::move(ys));
}

Profile Profile::parse(const std::string& text) {
    if (text.rfind("csv:", 0) == 0) return from_csv(text.substr(4));
    if (text.rfind("exp:", 0) == 0) {
        std::vector<double> p;
        std::string_view rest = std::string_view(text).substr(4);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            p.push_back(to_double(rest.substr(0, comma), "profile"));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        if (p.size() != 3 || !(p[1] > 0.0)) throw ConfigError("profile: expected 'exp:amplitude,scale,floor' with scale > 0");
        std::vector<double> xs(kExpKnots), ys(kExpKnots);
        for (std::size_t k = 0; k < kExpKnots; ++k) {
            xs[k] = static_cast<double>(k) / (kExpKnots - 1);
            ys[k] = p[0] * std::exp(-xs[k] / p[1]) + p[2];
        }
        return Profile(std::move(xs), std::move(ys));
    }
    if (text.find(':') == std::string::npos) return Profile(to_double(text, "profile"));
    std::vector<double> xs, ys;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) {
        if (tok.back() == ',') tok.pop_back();
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw ConfigError("profile: expected 'x:value', got '" + tok + "'");
        xs.push_back(to_double(std::string_view(tok).substr(0, colon), "profile"));
        ys.push_back(to_double(std::string_view(tok).substr(colon + 1), "profile"));
    }
    return Profile(std::move(xs), std::move(ys));
}

} // namespace lobsim
