#include "lobsim/core/stencil_tables.hpp"

namespace lobsim {

simd::StencilTables build_stencil_tables(const CoefficientSet& coeffs, Side side, int num_ticks, double mid,
                                         const StencilScaling& scaling) {
    const auto levels = static_cast<std::size_t>(num_ticks - 1);
    simd::StencilTables t;
    t.drift_base.resize(levels);
    t.drift_slope.resize(levels);
    t.vol_base.resize(levels);
    t.vol_slope.resize(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        const PointCoefficients p = coeffs.at(side, static_cast<double>(l + 1) / num_ticks, mid);
        t.drift_base[l] = p.drift_base() * scaling.drift_factor;
        t.drift_slope[l] = p.drift_slope() * scaling.volume_scale * scaling.drift_factor;
        t.vol_base[l] = p.sigma_base * scaling.noise_factor;
        t.vol_slope[l] = p.sigma_slope * scaling.volume_scale * scaling.noise_factor;
    }
    t.diffusion = coeffs.side(side).alpha * scaling.diffusion_factor;
    return t;
}

} // namespace lobsim
