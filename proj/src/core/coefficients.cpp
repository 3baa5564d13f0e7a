#include "lobsim/core/coefficients.hpp"

#include <cmath>
#include <string>

#include "lobsim/error.hpp"

namespace lobsim {

namespace {

void check_nonnegative(const AffineCoefficient& c, const std::string& name) {
    if (c.base.min_value() < 0.0) throw ConfigError(name + ": base values must be nonnegative");
    if (c.slope.min_value() < 0.0) throw ConfigError(name + ": slope values must be nonnegative");
}

} // namespace

PointCoefficients CoefficientSet::at(Side s, double x, double mid) const {
    const SideCoefficients& c = side(s);
    PointCoefficients p{c.sigma.base(x),      c.sigma.slope(x),      c.limit_rate.base(x),
                        c.limit_rate.slope(x), c.cancel_rate.base(x), c.cancel_rate.slope(x)};
    if (mid_hook) mid_hook(s, mid, x, p);
    return p;
}

void CoefficientSet::validate(bool allow_zero_alpha) const {
    for (Side s : {Side::bid, Side::ask}) {
        const std::string prefix = "coefficients-" + std::string(to_string(s));
        const SideCoefficients& c = side(s);
        check_nonnegative(c.sigma, prefix + ".sigma");
        check_nonnegative(c.limit_rate, prefix + ".limit_rate");
        check_nonnegative(c.cancel_rate, prefix + ".cancel_rate");
        if (c.alpha < 0.0 || (!allow_zero_alpha && c.alpha == 0.0))
            throw ConfigError(prefix + ".alpha must be positive");
    }
}

MicroRates eval_rates_micro(const CoefficientSet& coeffs, Side side, int level, long long volume,
                            int num_ticks, double n, double mid) {
    if (level < 1 || level > num_ticks - 1)
        throw std::out_of_range("eval_rates_micro: level " + std::to_string(level) + " outside 1.." +
                                std::to_string(num_ticks - 1));
    const PointCoefficients p = coeffs.at(side, static_cast<double>(level) / num_ticks, mid);
    const double root_n = std::sqrt(n);
    const double u = static_cast<double>(volume) / root_n;
    const double sigma = p.sigma(u);
    const double half_var = 0.5 * sigma * sigma;
    MicroRates r;
    r.add = half_var * (volume == 0 ? 2.0 : 1.0) + p.limit(u) / root_n;
    r.remove = volume >= 1 ? half_var + p.cancel(u) / root_n : 0.0;
    r.left = r.right = coeffs.side(side).alpha / n * static_cast<double>(volume);
    return r;
}

} // namespace lobsim
