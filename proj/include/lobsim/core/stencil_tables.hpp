#pragma once

#include "lobsim/core/coefficients.hpp"
#include "lobsim/simd/stencil.hpp"

namespace lobsim {

// How model coefficients enter one projected Euler step:
//   drift  h(x, u * volume_scale) * drift_factor
//   noise  sigma(x, u * volume_scale) * noise_factor * z
//   diffusion alpha * diffusion_factor
struct StencilScaling {
    double drift_factor = 1.0;
    double noise_factor = 1.0;
    double diffusion_factor = 1.0;
    double volume_scale = 1.0;
};

simd::StencilTables build_stencil_tables(const CoefficientSet& coeffs, Side side, int num_ticks, double mid,
                                         const StencilScaling& scaling);

} // namespace lobsim
