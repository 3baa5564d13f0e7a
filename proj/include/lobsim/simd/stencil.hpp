#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lobsim::simd {

// Per-level coefficients of one projected Euler step of the reflected
// stencil equation, already multiplied by the time-step factors:
//
//   pre[i]    = u[i] + diffusion * (u[i-1] + u[i+1] - 2 u[i])
//             + (drift_base[i] + drift_slope[i] * u[i])
//             + (vol_base[i] + vol_slope[i] * u[i]) * z[i]
//   out[i]    = max(pre[i], 0)
//   pushed[i] = max(-pre[i], 0)
//
// with u[-1] = u[n] = 0.
struct StencilTables {
    std::vector<double> drift_base;
    std::vector<double> drift_slope;
    std::vector<double> vol_base;
    std::vector<double> vol_slope;
    double diffusion = 0.0;

    std::size_t size() const { return drift_base.size(); }
};

// Returns false if any pre-projection value was NaN or infinite.
using StencilKernel = bool (*)(const double* u, const double* z, const StencilTables& t, double* out,
                               double* pushed, std::size_t n);

bool reflected_step_scalar(const double* u, const double* z, const StencilTables& t, double* out,
                           double* pushed, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
bool reflected_step_avx2(const double* u, const double* z, const StencilTables& t, double* out,
                         double* pushed, std::size_t n);
#endif

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);
bool isa_supported(Isa isa);
// Best supported ISA; LOBSIM_SIMD=scalar|avx2 in the environment overrides.
Isa active_isa();
StencilKernel kernel_for(Isa isa);

// Dispatched entry point. `out` and `pushed` must not alias `u`.
bool reflected_step(std::span<const double> u, std::span<const double> z, const StencilTables& t,
                    std::span<double> out, std::span<double> pushed);

} // namespace lobsim::simd
