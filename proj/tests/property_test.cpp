#include "doctest.h"

#include <cstdlib>

#include "lobsim/rng.hpp"
#include "lobsim/simd/stencil.hpp"
#include "property_suite.hpp"

using namespace lobsim;

TEST_CASE("property suite at 10^4 cases") {
    const auto results = testing::run_property_suite(4242, 10'000);
    CHECK(results.size() >= 11);
    for (const auto& r : results) {
        CAPTURE(r.name);
        CAPTURE(r.first_failure);
        CHECK(r.cases == 10'000);
        CHECK(r.pass());
    }
}

TEST_CASE("stencil dispatch") {
    CHECK(simd::isa_supported(simd::Isa::scalar));
    CHECK(simd::kernel_for(simd::Isa::scalar) == &simd::reflected_step_scalar);
    const char* forced = std::getenv("LOBSIM_SIMD");
    if (forced && std::string(forced) == "scalar") CHECK(simd::active_isa() == simd::Isa::scalar);
#if defined(__x86_64__)
    if (simd::isa_supported(simd::Isa::avx2)) {
        CHECK(simd::kernel_for(simd::Isa::avx2) == &simd::reflected_step_avx2);
        // Odd lengths exercise the scalar tail of the vector kernel.
        Rng rng = make_stream(9);
        for (std::size_t n : {1, 3, 4, 5, 7, 8, 13, 64, 101}) {
            simd::StencilTables t;
            std::vector<double> u(n), z(n);
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = draw_uniform(rng);
                z[i] = draw_normal(rng);
                t.drift_base.push_back(0.1 * draw_normal(rng));
                t.drift_slope.push_back(0.1 * draw_normal(rng));
                t.vol_base.push_back(draw_uniform(rng));
                t.vol_slope.push_back(0.5 * draw_uniform(rng));
            }
            t.diffusion = 0.3;
            std::vector<double> o1(n), p1(n), o2(n), p2(n);
            CHECK(simd::reflected_step_scalar(u.data(), z.data(), t, o1.data(), p1.data(), n));
            CHECK(simd::reflected_step_avx2(u.data(), z.data(), t, o2.data(), p2.data(), n));
            CHECK(o1 == o2);
            CHECK(p1 == p2);
        }
    }
#endif
}
