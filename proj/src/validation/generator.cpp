#include "lobsim/validation/generator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobsim/micro/micro_sim.hpp"
#include "lobsim/parallel.hpp"

namespace lobsim::validation {

namespace {

std::vector<double> stack(const RealBook& b) {
    std::vector<double> v(b.bid);
    v.insert(v.end(), b.ask.begin(), b.ask.end());
    return v;
}

void check_boundary(const TestFunction& F, std::vector<double> x) {
    std::vector<double> grad(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double keep = x[k];
        x[k] = 0.0;
        F.gradient(x, grad);
        x[k] = keep;
        if (std::abs(grad[k]) > 1e-9)
            throw std::invalid_argument("generator_residual: test function has nonzero normal derivative on the face x_" +
                                        std::to_string(k) + " = 0");
    }
}

} // namespace

double limit_generator(const CoefficientSet& coeffs, int num_ticks, const TestFunction& F, const RealBook& x) {
    const std::vector<double> s = stack(x);
    std::vector<double> grad(s.size()), hess(s.size());
    F.gradient(s, grad);
    F.hessian_diag(s, hess);
    const std::size_t L = x.bid.size();
    double out = 0.0;
    for (Side side : {Side::bid, Side::ask}) {
        const auto& v = x.side(side);
        const std::size_t off = side == Side::bid ? 0 : L;
        const double alpha = coeffs.side(side).alpha;
        for (std::size_t i = 0; i < L; ++i) {
            const PointCoefficients p = coeffs.at(side, static_cast<double>(i + 1) / num_ticks, x.mid);
            const double u = v[i];
            const double sigma = p.sigma(u);
            const double left = i > 0 ? v[i - 1] : 0.0, right = i + 1 < L ? v[i + 1] : 0.0;
            const double drift = p.limit(u) - p.cancel(u) + alpha * (left + right - 2.0 * u);
            out += 0.5 * sigma * sigma * hess[off + i] + drift * grad[off + i];
        }
    }
    return out;
}

GeneratorResidual generator_residual(const CoefficientSet& coeffs, int num_ticks, const TestFunction& F,
                                     const RealBook& x, double t, double n, std::size_t paths, std::uint64_t seed) {
    if (!(t > 0.0)) throw std::invalid_argument("generator_residual: t must be positive");
    if (paths < 2) throw std::invalid_argument("generator_residual: need at least two paths");
    if (!F.value || !F.gradient || !F.hessian_diag)
        throw std::invalid_argument("generator_residual: test function needs value, gradient and Hessian diagonal");
    if (x.bid.size() != static_cast<std::size_t>(num_ticks - 1) || x.ask.size() != x.bid.size())
        throw std::invalid_argument("generator_residual: state does not match the grid");
    const double root_n = std::sqrt(n);
    for (Side s : {Side::bid, Side::ask})
        for (double v : x.side(s))
            if (std::abs(v * root_n - std::round(v * root_n)) > 1e-9 * std::max(1.0, v * root_n) || v < 0.0)
                throw std::invalid_argument("generator_residual: state is not on the 1/sqrt(n) lattice");
    const std::vector<double> x0 = stack(x);
    check_boundary(F, x0);

    GeneratorResidual r;
    r.generator = limit_generator(coeffs, num_ticks, F, x);
    r.paths = paths;
    const double f0 = F.value(x0);

    micro::MicroModel model;
    model.grid.num_ticks = num_ticks;
    model.coeffs = coeffs;
    model.n = n;
    model.price_dynamics = false;
    const MicroBook init = micro::initial_from_meso(x, n);
    const double horizon = n * t;

    // Fixed-size chunks with their own streams, so the result does not depend
    // on the thread count.
    constexpr std::size_t chunk = 4096;
    const std::size_t chunks = (paths + chunk - 1) / chunk;
    std::vector<double> sum(chunks, 0.0), sum_sq(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t c) {
        Rng rng = make_stream(seed, c);
        const std::size_t begin = c * chunk, end = std::min(paths, begin + chunk);
        std::vector<double> state(x0.size());
        for (std::size_t p = begin; p < end; ++p) {
            micro::MicroSimulator sim(model, init);
            for (;;) {
                const auto o = sim.step(rng, horizon);
                if (o.status == micro::StepOutcome::Status::horizon || o.status == micro::StepOutcome::Status::frozen)
                    break;
            }
            const MicroBook& b = sim.book();
            for (std::size_t i = 0; i < b.bid.size(); ++i) state[i] = static_cast<double>(b.bid[i]) / root_n;
            for (std::size_t i = 0; i < b.ask.size(); ++i) state[b.bid.size() + i] = static_cast<double>(b.ask[i]) / root_n;
            const double d = F.value(state) - f0;
            sum[c] += d;
            sum_sq[c] += d * d;
        }
    });
    double s = 0.0, ss = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        s += sum[c];
        ss += sum_sq[c];
    }
    const double m = static_cast<double>(paths);
    const double mean = s / m;
    const double var = (ss - m * mean * mean) / (m - 1.0);
    r.estimate = mean / t;
    r.std_error = std::sqrt(std::max(var, 0.0) / m) / t;
    r.residual = r.estimate - r.generator;
    return r;
}

} // namespace lobsim::validation
