#include "lobsim/core/regeneration.hpp"

#include <cmath>

#include "lobsim/error.hpp"

namespace lobsim {

void regenerate(std::vector<double>& bid, std::vector<double>& ask, Direction d,
                const RegenerationRule& rule, Rng& rng) {
    switch (rule.kind) {
    case RegenerationRule::Kind::shift:
        apply_shift(bid, ask, d, rule.bins);
        break;
    case RegenerationRule::Kind::identity:
        break;
    case RegenerationRule::Kind::custom:
        if (!rule.sampler) throw ConfigError("regeneration: custom rule without a sampler");
        rule.sampler(bid, ask, d, rng);
        for (double& v : bid) v = std::max(v, 0.0);
        for (double& v : ask) v = std::max(v, 0.0);
        break;
    }
}

void regenerate(std::vector<long long>& bid, std::vector<long long>& ask, Direction d,
                const RegenerationRule& rule, Rng& rng, double n) {
    if (rule.kind != RegenerationRule::Kind::custom) {
        if (rule.kind == RegenerationRule::Kind::shift) apply_shift(bid, ask, d, rule.bins);
        return;
    }
    const double root_n = std::sqrt(n);
    std::vector<double> b(bid.size()), a(ask.size());
    for (std::size_t i = 0; i < bid.size(); ++i) b[i] = static_cast<double>(bid[i]) / root_n;
    for (std::size_t i = 0; i < ask.size(); ++i) a[i] = static_cast<double>(ask[i]) / root_n;
    regenerate(b, a, d, rule, rng);
    for (std::size_t i = 0; i < bid.size(); ++i) bid[i] = std::llround(b[i] * root_n);
    for (std::size_t i = 0; i < ask.size(); ++i) ask[i] = std::llround(a[i] * root_n);
}

} // namespace lobsim
