#include "lmpred/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lmpred/error.hpp"
#include "lmpred/parallel.hpp"
#include "lmpred/rng.hpp"

namespace lmpred {

MeanSe mean_se(std::span<const double> x) {
    MeanSe out;
    out.count = x.size();
    if (x.empty()) return out;
    const double n = static_cast<double>(x.size());
    out.mean = pairwise_sum(x) / n;
    if (x.size() < 2) return out;
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - out.mean) * (x[i] - out.mean);
    out.variance = pairwise_sum(sq) / (n - 1.0);
    out.se = std::sqrt(out.variance / n);
    return out;
}

Moments sample_moments(std::span<const double> x) {
    require(x.size() >= 2, ErrorKind::Contract, "sample_moments: need at least 2 points");
    Moments out;
    const double n = static_cast<double>(x.size());
    out.mean = pairwise_sum(x) / n;
    std::vector<double> p2(x.size()), p3(x.size()), p4(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - out.mean;
        p2[i] = d * d;
        p3[i] = d * d * d;
        p4[i] = d * d * d * d;
    }
    const double m2 = pairwise_sum(p2) / n, m3 = pairwise_sum(p3) / n, m4 = pairwise_sum(p4) / n;
    out.variance = m2 * n / (n - 1.0);
    out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    out.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    return out;
}

double kolmogorov_survival(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.0) {
        // Small x: K(x) = sqrt(2 pi)/x sum_{j>=1} exp(-(2j-1)^2 pi^2 / (8 x^2)).
        const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
        double sum = 0.0;
        for (int j = 1; j < 100; ++j) {
            const double term = std::exp(-(2.0 * j - 1.0) * (2.0 * j - 1.0) * c);
            sum += term;
            if (term < 1e-12 * std::max(sum, 1e-300)) break;
        }
        return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * sum;
    }
    // 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2), truncated once terms drop below 1e-12.
    double sum = 0.0;
    for (int j = 1; j < 100; ++j) {
        const double term = 2.0 * std::exp(-2.0 * j * j * x * x);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> sample) {
    require(sample.size() >= 50, ErrorKind::Contract, "ks_test: need at least 50 points");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double m = static_cast<double>(s.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double F = normal_cdf(s[i]);
        dist = std::max({dist, static_cast<double>(i + 1) / m - F, F - static_cast<double>(i) / m});
    }
    return {dist, kolmogorov_survival(std::sqrt(m) * dist)};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::Contract, "fit_line: need >= 2 matched points");
    require(weights.empty() || weights.size() == x.size(), ErrorKind::Contract, "fit_line: weight size mismatch");
    const std::size_t n = x.size();
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sw += w, sx += w * x[i], sy += w * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sxx += w * (x[i] - mx) * (x[i] - mx);
        sxy += w * (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, ErrorKind::Contract, "fit_line: x values are all equal");
    LineFit out;
    out.points = n;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double r = y[i] - out.intercept - out.slope * x[i];
        out.rss += w * r * r;
    }
    if (n > 2) out.slope_se = std::sqrt(out.rss / static_cast<double>(n - 2) / sxx);
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    require(!sorted.empty() && p >= 0.0 && p <= 1.0, ErrorKind::Contract, "quantile_sorted: bad input");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace lmpred
