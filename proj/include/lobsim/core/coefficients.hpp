#pragma once

#include <functional>

#include "lobsim/core/grid.hpp"
#include "lobsim/core/profile.hpp"

namespace lobsim {

// value(x, u) = base(x) + slope(x) * u. Affine in volume, hence Lipschitz.
struct AffineCoefficient {
    Profile base;
    Profile slope = Profile::constant(0.0);

    double value(double x, double u) const { return base(x) + slope(x) * u; }
};

struct SideCoefficients {
    AffineCoefficient sigma;        // volatility
    AffineCoefficient limit_rate;   // f
    AffineCoefficient cancel_rate;  // g
    double alpha = 0.0;             // smoothing rate
};

// Coefficients frozen at one grid position. Drift h = f - g.
struct PointCoefficients {
    double sigma_base = 0, sigma_slope = 0;
    double limit_base = 0, limit_slope = 0;
    double cancel_base = 0, cancel_slope = 0;

    double sigma(double u) const { return sigma_base + sigma_slope * u; }
    double limit(double u) const { return limit_base + limit_slope * u; }
    double cancel(double u) const { return cancel_base + cancel_slope * u; }
    double drift_base() const { return limit_base - cancel_base; }
    double drift_slope() const { return limit_slope - cancel_slope; }
};

// Optional mid dependence. Called after the tabulated values are looked up;
// it may rescale them in place (keeping them nonnegative).
using MidHook = std::function<void(Side, double mid, double x, PointCoefficients&)>;

struct CoefficientSet {
    SideCoefficients bid;
    SideCoefficients ask;
    MidHook mid_hook;

    const SideCoefficients& side(Side s) const { return s == Side::bid ? bid : ask; }
    SideCoefficients& side(Side s) { return s == Side::bid ? bid : ask; }

    PointCoefficients at(Side s, double x, double mid = 0.0) const;
    // Nonnegative bases and slopes, alpha >= 0 (> 0 unless allow_zero_alpha).
    void validate(bool allow_zero_alpha = false) const;

    static CoefficientSet symmetric(const SideCoefficients& c) { return {c, c, {}}; }
};

// Micro-scale rates at one level, after the heavy-traffic scaling with index n:
// sigma_n(i,u) = sigma(i, u/sqrt n), f_n = f(i, u/sqrt n)/sqrt n, alpha_n = alpha/n.
struct MicroRates {
    double add = 0;
    double remove = 0;
    double left = 0;
    double right = 0;

    double total() const { return add + remove + left + right; }
};

MicroRates eval_rates_micro(const CoefficientSet& coeffs, Side side, int level, long long volume,
                            int num_ticks, double n, double mid = 0.0);

} // namespace lobsim
