#include <gtest/gtest.h>

#include <cmath>

#include "lmpred/error.hpp"
#include "lmpred/model.hpp"
#include "lmpred/stats.hpp"
#include "lmpred/theory.hpp"

using namespace lmpred;

namespace {

ProcessSpec fn(double d) {
    ProcessSpec s;
    s.d = d;
    return s;
}

double s0(double d) { return std::tgamma(1 - 2 * d) / std::pow(std::tgamma(1 - d), 2); }

}  // namespace

TEST(ProjectionErrorVariance, Examples) {
    for (std::size_t k : {1u, 5u, 40u}) EXPECT_EQ(projection_error_variance(fn(0.0), k), 0.0);
    const double expected = s0(0.3) * 40.0 / 49.0 - 1.0;
    EXPECT_NEAR(projection_error_variance(fn(0.3), 1), expected, 1e-14);
    EXPECT_NEAR(expected, 0.0746580099, 1e-10);
}

TEST(ProjectionErrorVariance, ProductOfReflections) {
    // v_k = sigma(0) prod_{j<=k} (1 - rho_j^2), rho_j = d / (j - d)
    const double d = 0.4;
    double v = s0(d);
    const auto all = projection_error_variances(fn(d), 30);
    for (std::size_t j = 1; j <= 30; ++j) {
        const double rho = d / (j - d);
        v *= 1 - rho * rho;
        EXPECT_NEAR(all[j - 1], v - 1.0, 1e-13) << j;
    }
}

TEST(ProjectionErrorVariance, DecreasingToZero) {
    const auto e = projection_error_variances(fn(0.3), 256);
    for (std::size_t k = 1; k < e.size(); ++k) EXPECT_LT(e[k], e[k - 1]) << k;
    EXPECT_LT(e.back(), 1e-2 * e.front());
}

TEST(ProjectionErrorVariance, InverseOrderSlope) {
    const auto e = projection_error_variances(fn(0.3), 512);
    std::vector<double> lx, ly;
    for (std::size_t k = 16; k <= 512; k *= 2) {
        lx.push_back(std::log(double(k)));
        ly.push_back(std::log(e[k - 1]));
    }
    EXPECT_NEAR(fit_line(lx, ly).slope, -1.0, 0.05);
}

TEST(ProjectionErrorQuadratic, AgreesWithLevinsonRoute) {
    const auto lev = projection_error_variances(fn(0.3), 64);
    const auto quad = projection_error_quadratic(fn(0.3), 64, 1 << 15);
    ASSERT_EQ(quad.size(), 64u);
    for (std::size_t k = 1; k <= 64; ++k) {
        const double tol = std::max(1e-8, quad[k - 1].tail_bound);
        EXPECT_NEAR(quad[k - 1].value, lev[k - 1], tol) << k;
    }
}

TEST(ProjectionErrorQuadratic, TailBoundIsHonest) {
    // With a short truncation the bound must still cover the gap.
    const auto lev = projection_error_variances(fn(0.4), 8);
    const auto quad = projection_error_quadratic(fn(0.4), 8, 64);
    for (std::size_t k = 1; k <= 8; ++k) {
        EXPECT_LE(std::abs(quad[k - 1].value - lev[k - 1]), quad[k - 1].tail_bound) << k;
        EXPECT_GT(quad[k - 1].tail_bound, 1e-6);
    }
}

TEST(Ln, Examples) {
    EXPECT_NEAR(l_n(fn(0.0), 100, 10, 5), 5.0 / 91.0, 1e-16);
    EXPECT_NEAR(l_n(fn(0.3), 1000, 10, 1), s0(0.3) * 40.0 / 49.0 - 1.0 + 1.0 / 991.0, 1e-14);
}

TEST(Ln, SweepHasInteriorMinimiser) {
    // goodness-of-fit term falls like 1/k, complexity term rises like k
    const std::size_t n = 2000, K = 60;
    std::size_t best = 1;
    for (std::size_t k = 1; k <= K; ++k)
        if (l_n(fn(0.3), n, K, k) < l_n(fn(0.3), n, K, best)) best = k;
    EXPECT_GT(best, 1u);
    EXPECT_LT(best, K);
    const double gap = projection_error_variance(fn(0.3), best) - double(best) / (n - K + 1);
    EXPECT_LT(std::abs(gap), projection_error_variance(fn(0.3), 1));
}

TEST(RateRegime, ThreeRegimes) {
    const auto sub = rate_regime(fn(0.1));
    EXPECT_EQ(sub.regime, Regime::Sub);
    EXPECT_DOUBLE_EQ(sub.predicted_log_slope, -0.5);
    const auto super = rate_regime(fn(0.35));
    EXPECT_EQ(super.regime, Regime::Super);
    EXPECT_NEAR(super.predicted_log_slope, -0.3, 1e-15);
    const auto crit = rate_regime(fn(0.25));
    EXPECT_EQ(crit.regime, Regime::Critical);
    EXPECT_TRUE(crit.log_corrected);
    EXPECT_FALSE(rate_regime(fn(0.26)).warning.empty());
    EXPECT_TRUE(rate_regime(fn(0.35)).warning.empty());
    EXPECT_THROW(rate_regime(fn(0.0)), Error);
}

TEST(RateFunction, Shapes) {
    const double m = 1000 - 2 + 1;
    EXPECT_NEAR(rate_function(0.1, 1000, 2), 4.0 / m, 1e-15);
    EXPECT_NEAR(rate_function(0.25, 1000, 2), 4.0 * std::log(m) / m, 1e-15);
    EXPECT_NEAR(rate_function(0.35, 1000, 2), 4.0 * std::pow(m, 4 * 0.35 - 2), 1e-15);
}

TEST(ValidateSchedule, Examples) {
    EXPECT_TRUE(validate_schedule(fn(0.3), 10000, 2, Theorem::T2).all_passed());
    const auto fail = validate_schedule(fn(0.3), 10000, 10, Theorem::T2);
    EXPECT_FALSE(fail.all_passed());
    EXPECT_NEAR(fail.find("T2_K4")->value, std::pow(10000.0, 0.35) / 10000.0, 1e-12);
    const auto t3 = validate_schedule(fn(0.45), 1000000, 2, Theorem::T3);
    const auto* c = t3.find("T3_K1p2d");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->passed);
    EXPECT_NEAR(c->value, std::pow(1e6, 0.05) / std::pow(2.0, 1.9), 1e-9);
    EXPECT_TRUE(t3.find("T3_K4")->passed);
}

TEST(SigmaInvSBound, Examples) {
    for (std::size_t K = 4; K <= 128; K *= 2) {
        const auto b = sigma_inv_s_bound(fn(0.3), K, 0.1);
        ASSERT_TRUE(b.applicable);
        EXPECT_GE(b.value * projection_error_variance(fn(0.3), K), 1.0 - 1e-12) << K;
    }
    EXPECT_FALSE(sigma_inv_s_bound(fn(0.0), 8, 0.1).applicable);
    double prev = 0.0;
    for (std::size_t K = 1; K <= 64; ++K) {
        const double v = sigma_inv_s_bound(fn(0.3), K, 0.1).value;
        EXPECT_GT(v, prev);
        prev = v;
    }
}
