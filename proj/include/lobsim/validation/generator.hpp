#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "lobsim/core/book.hpp"
#include "lobsim/core/coefficients.hpp"

namespace lobsim::validation {

// Smooth test function of the stacked state (bid levels, then ask levels).
// Only the diagonal of the Hessian enters the generator since the noises of
// different levels are independent.
struct TestFunction {
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    std::function<void(std::span<const double>, std::span<double>)> hessian_diag;
};

// A F(x) = sum_k 1/2 sigma_k^2 F_kk + sum_k [h_k + alpha (x_{k-1} + x_{k+1} - 2 x_k)] F_k
// with h = f - g and zero neighbours outside the grid.
double limit_generator(const CoefficientSet& coeffs, int num_ticks, const TestFunction& F, const RealBook& x);

struct GeneratorResidual {
    double generator = 0.0;  // A F(x)
    double estimate = 0.0;   // (E F(Z_n(t)) - F(x)) / t
    double residual = 0.0;   // estimate - generator
    double std_error = 0.0;  // of the estimate
    std::size_t paths = 0;
};

// Monte Carlo comparison of the rescaled micro process started at x (which
// must lie on the 1/sqrt(n) lattice) against the limit generator. F must have
// zero normal derivative on every face x_k = 0; std::invalid_argument otherwise.
GeneratorResidual generator_residual(const CoefficientSet& coeffs, int num_ticks, const TestFunction& F,
                                     const RealBook& x, double t, double n, std::size_t paths, std::uint64_t seed);

} // namespace lobsim::validation
