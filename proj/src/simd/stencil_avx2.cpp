#include "lobsim/simd/stencil.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace lobsim::simd {

namespace {

inline double scalar_point(const double* u, const double* z, const StencilTables& t, std::size_t i,
                           std::size_t n, double* out, double* pushed) {
    const double left = i > 0 ? u[i - 1] : 0.0;
    const double right = i + 1 < n ? u[i + 1] : 0.0;
    const double x = u[i];
    const double lap = (left + right) - 2.0 * x;
    const double drift = t.drift_base[i] + t.drift_slope[i] * x;
    const double vol = t.vol_base[i] + t.vol_slope[i] * x;
    const double pre = ((x + t.diffusion * lap) + drift) + vol * z[i];
    out[i] = pre > 0.0 ? pre : 0.0;
    pushed[i] = -pre > 0.0 ? -pre : 0.0;
    return pre;
}

} // namespace

// Built with -mavx2 only (no FMA) so every multiply and add rounds exactly as
// in the scalar kernel.
bool reflected_step_avx2(const double* u, const double* z, const StencilTables& t, double* out,
                         double* pushed, std::size_t n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    bool finite = true;
    if (n < 6) {
        for (std::size_t i = 0; i < n; ++i) finite = finite && std::fabs(scalar_point(u, z, t, i, n, out, pushed)) < inf;
        return finite;
    }

    finite = std::fabs(scalar_point(u, z, t, 0, n, out, pushed)) < inf;

    const __m256d c = _mm256_set1_pd(t.diffusion);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d vinf = _mm256_set1_pd(inf);
    __m256d bad = _mm256_setzero_pd();

    std::size_t i = 1;
    // Interior block: i-1 >= 0 and i+4 <= n-1.
    for (; i + 4 < n; i += 4) {
        const __m256d left = _mm256_loadu_pd(u + i - 1);
        const __m256d right = _mm256_loadu_pd(u + i + 1);
        const __m256d x = _mm256_loadu_pd(u + i);
        const __m256d lap = _mm256_sub_pd(_mm256_add_pd(left, right), _mm256_mul_pd(two, x));
        const __m256d drift =
            _mm256_add_pd(_mm256_loadu_pd(t.drift_base.data() + i), _mm256_mul_pd(_mm256_loadu_pd(t.drift_slope.data() + i), x));
        const __m256d vol =
            _mm256_add_pd(_mm256_loadu_pd(t.vol_base.data() + i), _mm256_mul_pd(_mm256_loadu_pd(t.vol_slope.data() + i), x));
        const __m256d pre = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(x, _mm256_mul_pd(c, lap)), drift),
                                          _mm256_mul_pd(vol, _mm256_loadu_pd(z + i)));
        bad = _mm256_or_pd(bad, _mm256_cmp_pd(_mm256_andnot_pd(sign, pre), vinf, _CMP_NLT_UQ));
        _mm256_storeu_pd(out + i, _mm256_max_pd(pre, zero));
        _mm256_storeu_pd(pushed + i, _mm256_max_pd(_mm256_xor_pd(pre, sign), zero));
    }
    for (; i < n; ++i) finite = finite && std::fabs(scalar_point(u, z, t, i, n, out, pushed)) < inf;
    return finite && _mm256_movemask_pd(bad) == 0;
}

} // namespace lobsim::simd
