#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lobsim::validation {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value
// (Stephens' small-sample correction). Throws std::domain_error on an empty sample.
KsResult ks_distance(std::span<const double> a, std::span<const double> b);

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

// E|B(t)| for B reflected at 0 from 0 with volatility sigma: sigma sqrt(2t/pi).
double reflected_bm_moment(double sigma, double t);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::vector<std::int64_t> bin_edges;  // lower edge of each bin
    std::vector<double> expected;
    std::vector<std::int64_t> observed;
};

// Goodness of fit of integer counts against Poisson(mean) using `bins`
// bins of near-equal probability. The mean is known, so dof = bins - 1.
ChiSquareResult chi_square_poisson(std::span<const std::int64_t> counts, double mean, int bins = 10);

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double std_error = 0.0;
};

MomentSummary summarize(std::span<const double> samples);

// Per checkpoint time and level: moments plus the empirical CDF on a grid.
struct EnsembleSummary {
    struct Cell {
        double time = 0.0;
        int level = 0;       // signed: > 0 bid level, < 0 ask level
        double mean = 0.0;
        double variance = 0.0;
        std::vector<double> cdf_grid;
        std::vector<double> cdf;
    };
    std::vector<Cell> cells;
    std::size_t count = 0;
    std::vector<std::uint64_t> seeds;

    static Cell make_cell(double time, int level, std::span<const double> samples, int grid_points = 21);
};

} // namespace lobsim::validation
