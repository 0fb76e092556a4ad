#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lmpred/error.hpp"
#include "lmpred/rng.hpp"
#include "lmpred/stats.hpp"

using namespace lmpred;

TEST(MeanSe, SmallSample) {
    const std::vector<double> x{1, 2, 3, 4};
    const auto r = mean_se(x);
    EXPECT_DOUBLE_EQ(r.mean, 2.5);
    EXPECT_DOUBLE_EQ(r.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.se, std::sqrt(5.0 / 3.0 / 4.0));
    EXPECT_EQ(r.count, 4u);
}

TEST(MeanSe, HalvesWithFourTimesData) {
    SplitMix64 g(5);
    std::vector<double> x(40000);
    for (auto& v : x) v = g.normal();
    const auto small = mean_se(std::span<const double>(x).first(10000));
    const auto big = mean_se(x);
    EXPECT_NEAR(small.se / big.se, 2.0, 0.1);
}

TEST(KsTest, QuantileSampleIsNearlyExact) {
    const std::size_t m = 1000;
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = normal_quantile((i + 0.5) / m);
    EXPECT_LE(ks_test(x).distance, 0.5 / m + 1e-12);
}

TEST(KsTest, PointMassAtMedian) {
    const std::vector<double> x(100, 0.0);
    EXPECT_NEAR(ks_test(x).distance, 0.5, 1e-15);
}

TEST(KsTest, UndersizedSample) {
    const std::vector<double> x(49, 0.0);
    EXPECT_THROW(ks_test(x), Error);
}

TEST(KolmogorovSurvival, SeriesValues) {
    // 2 sum (-1)^{j-1} exp(-2 j^2 x^2) at x = sqrt(1000) * 0.05
    const double x = std::sqrt(1000.0) * 0.05;
    double s = 0.0;
    for (int j = 1; j < 100; ++j) s += 2 * ((j % 2) ? 1 : -1) * std::exp(-2.0 * j * j * x * x);
    EXPECT_NEAR(kolmogorov_survival(x), s, 1e-12);
    EXPECT_NEAR(kolmogorov_survival(x), 0.0135, 5e-5);
    // small x: the other series; P(K > 0.5) = 0.9639452436648751
    EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-12);
    EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(KolmogorovSurvival, Monotone) {
    double prev = 1.0;
    for (double x = 0.05; x < 3.0; x += 0.05) {
        const double s = kolmogorov_survival(x);
        EXPECT_LE(s, prev + 1e-15);
        prev = s;
    }
}

TEST(FitLine, ExactLine) {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.rss, 0.0, 1e-24);
}

TEST(FitLine, WeightsIgnoreDownweightedOutlier) {
    const std::vector<double> x{0, 1, 2, 3}, y{0, 1, 2, 30}, w{1, 1, 1, 1e-12};
    EXPECT_NEAR(fit_line(x, y, w).slope, 1.0, 1e-6);
}

TEST(QuantileSorted, Type7) {
    const std::vector<double> x{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile_sorted(x, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.25), 1.75);
}

TEST(SampleMoments, Known) {
    const std::vector<double> x{-1, 1, -1, 1};
    const auto m = sample_moments(x);
    EXPECT_DOUBLE_EQ(m.mean, 0.0);
    EXPECT_DOUBLE_EQ(m.skewness, 0.0);
    EXPECT_NEAR(m.excess_kurtosis, -2.0, 1e-12);
}
