#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lobsim/simd/stencil.hpp"

namespace lobsim::simd {

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
    if (isa == Isa::scalar) return true;
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() {
    static const Isa chosen = [] {
        if (const char* env = std::getenv("LOBSIM_SIMD")) {
            const std::string v(env);
            if (v == "scalar") return Isa::scalar;
            if (v == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
        }
        return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
    }();
    return chosen;
}

StencilKernel kernel_for(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::avx2) return &reflected_step_avx2;
#endif
    return &reflected_step_scalar;
}

bool reflected_step(std::span<const double> u, std::span<const double> z, const StencilTables& t,
                    std::span<double> out, std::span<double> pushed) {
    const std::size_t n = u.size();
    if (z.size() < n || out.size() < n || pushed.size() < n || t.size() < n)
        throw std::invalid_argument("reflected_step: buffer sizes do not match");
    static const StencilKernel kernel = kernel_for(active_isa());
    return kernel(u.data(), z.data(), t, out.data(), pushed.data(), n);
}

} // namespace lobsim::simd
