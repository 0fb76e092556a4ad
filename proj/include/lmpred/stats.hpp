#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lmpred {

/// Mean and Monte Carlo standard error with a fixed (pairwise) summation order.
struct MeanSe {
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
    double se = 0.0;
    std::size_t count = 0;
};

MeanSe mean_se(std::span<const double> x);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

Moments sample_moments(std::span<const double> x);

struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against N(0, 1) with the asymptotic
/// Kolmogorov p-value. Needs at least 50 points.
KsResult ks_test(std::span<const double> sample);

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
    double rss = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x (+ weights if given, 1/sigma^2).
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> weights = {});

/// Linear-interpolated empirical quantile (type 7) of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace lmpred
