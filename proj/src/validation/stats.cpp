#include "lobsim/validation/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace lobsim::validation {

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;  // the series converges slowly here and the value rounds to 1
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::domain_error("ks_distance: empty sample");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    const double ne = std::sqrt(na * nb / (na + nb));
    r.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
    return r;
}

double reflected_bm_moment(double sigma, double t) {
    if (sigma < 0.0 || t < 0.0) throw std::domain_error("reflected_bm_moment: sigma and t must be >= 0");
    return sigma * std::sqrt(2.0 * t / std::numbers::pi);
}

ChiSquareResult chi_square_poisson(std::span<const std::int64_t> counts, double mean, int bins) {
    if (counts.empty()) throw std::domain_error("chi_square_poisson: no counts");
    if (!(mean > 0.0) || bins < 2) throw std::domain_error("chi_square_poisson: need mean > 0 and bins >= 2");
    const boost::math::poisson_distribution<double> pois(mean);
    // Lower edges at Poisson quantiles; first bin open below, last open above.
    ChiSquareResult r;
    r.bin_edges.push_back(0);
    for (int k = 1; k < bins; ++k) {
        const auto edge = static_cast<std::int64_t>(
            boost::math::quantile(pois, static_cast<double>(k) / bins));
        if (edge > r.bin_edges.back()) r.bin_edges.push_back(edge);
    }
    const std::size_t m = r.bin_edges.size();
    if (m < 2) throw std::domain_error("chi_square_poisson: mean too small for binning");
    const double n = static_cast<double>(counts.size());
    r.expected.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double lo = k == 0 ? 0.0 : boost::math::cdf(pois, static_cast<double>(r.bin_edges[k] - 1));
        const double hi = k + 1 == m ? 1.0 : boost::math::cdf(pois, static_cast<double>(r.bin_edges[k + 1] - 1));
        r.expected[k] = n * (hi - lo);
    }
    r.observed.assign(m, 0);
    for (std::int64_t c : counts) {
        const auto it = std::upper_bound(r.bin_edges.begin(), r.bin_edges.end(), c);
        ++r.observed[static_cast<std::size_t>(std::distance(r.bin_edges.begin(), it) - 1)];
    }
    for (std::size_t k = 0; k < m; ++k) {
        const double diff = static_cast<double>(r.observed[k]) - r.expected[k];
        r.statistic += diff * diff / r.expected[k];
    }
    r.dof = static_cast<int>(m) - 1;
    const boost::math::chi_squared_distribution<double> chi(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(chi, r.statistic));
    return r;
}

MomentSummary summarize(std::span<const double> samples) {
    MomentSummary s;
    if (samples.empty()) return s;
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    s.mean = mean;
    s.variance = samples.size() > 1 ? ss / (n - 1.0) : 0.0;
    s.std_error = std::sqrt(s.variance / n);
    return s;
}

EnsembleSummary::Cell EnsembleSummary::make_cell(double time, int level, std::span<const double> samples,
                                                 int grid_points) {
    if (samples.empty()) throw std::domain_error("EnsembleSummary: empty sample");
    Cell c;
    c.time = time;
    c.level = level;
    const MomentSummary m = summarize(samples);
    c.mean = m.mean;
    c.variance = m.variance;
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();
    for (int k = 0; k < grid_points; ++k) {
        const double x = grid_points == 1 ? hi : lo + (hi - lo) * k / (grid_points - 1);
        c.cdf_grid.push_back(x);
        c.cdf.push_back(static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
                        static_cast<double>(sorted.size()));
    }
    return c;
}

} // namespace lobsim::validation
