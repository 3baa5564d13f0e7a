#include "lobsim/simd/stencil.hpp"

#include <cmath>
#include <limits>

namespace lobsim::simd {

// Reference kernel. The AVX2 variant evaluates the same expression tree in the
// same order, so both produce bit-identical output.
bool reflected_step_scalar(const double* u, const double* z, const StencilTables& t, double* out,
                           double* pushed, std::size_t n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double c = t.diffusion;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < n ? u[i + 1] : 0.0;
        const double x = u[i];
        const double lap = (left + right) - 2.0 * x;
        const double drift = t.drift_base[i] + t.drift_slope[i] * x;
        const double vol = t.vol_base[i] + t.vol_slope[i] * x;
        const double pre = ((x + c * lap) + drift) + vol * z[i];
        finite = finite && (std::fabs(pre) < inf);
        out[i] = pre > 0.0 ? pre : 0.0;
        pushed[i] = -pre > 0.0 ? -pre : 0.0;
    }
    return finite;
}

} // namespace lobsim::simd
