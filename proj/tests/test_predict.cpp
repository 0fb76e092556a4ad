#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "lmpred/error.hpp"
#include "lmpred/model.hpp"
#include "lmpred/predict.hpp"
#include "lmpred/simulate.hpp"
#include "lmpred/stats.hpp"
#include "lmpred/theory.hpp"

using namespace lmpred;

namespace {

ProcessSpec fn(double d) {
    ProcessSpec s;
    s.d = d;
    return s;
}

}  // namespace

TEST(TheoreticalCoefficients, Examples) {
    const auto c = theoretical_coefficients(fn(0.3), 1);
    EXPECT_EQ(c.a[0], -0.3 / 0.7);
    EXPECT_EQ(c.source.kind, CoeffSourceKind::Theoretical);
    for (double a : theoretical_coefficients(fn(0.0), 4).a) EXPECT_EQ(a, 0.0);
    const auto c5 = theoretical_coefficients(fn(0.3), 5);
    for (std::size_t j = 1; j <= 5; ++j) EXPECT_NEAR(c5.reflection[j - 1], 0.3 / (j - 0.3), 1e-15);
}

TEST(TheoreticalCoefficients, ClosedFormRouteMatchesLevinson) {
    for (double d : {0.1, 0.3, 0.45}) {
        const auto closed = theoretical_coefficients(fn(d), 64);
        const auto lev = levinson_solve(autocovariance(fn(d), 64));
        for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(closed.a[i], lev.a[i], 1e-12) << d;
        EXPECT_NEAR(*closed.v, *lev.v, 1e-12);
    }
}

TEST(EstimatedCoefficients, HandEvaluated) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const auto c = estimated_coefficients(x, 1, 1);
    EXPECT_NEAR(-c.a[0], 40.0 / 55.0, 1e-15);
    EXPECT_EQ(c.source.kind, CoeffSourceKind::Estimated);
    EXPECT_EQ(c.source.n, 5u);
    EXPECT_NEAR(predict_same_realisation(x, 1, 1), 40.0 / 11.0, 1e-14);
}

TEST(EstimatedCoefficients, WhiteNoiseNearZero) {
    const std::size_t R = 200;
    const auto paths = sample_batch(fn(0.0), 10000, R, 3);
    std::vector<double> a1(R), a2(R);
    for (std::size_t r = 0; r < R; ++r) {
        const auto c = estimated_coefficients(paths[r], 2, 4);
        EXPECT_EQ(c.source.seed, paths[r].seed);
        a1[r] = c.a[0];
        a2[r] = c.a[1];
    }
    EXPECT_NEAR(mean_se(a1).mean, 0.0, 4 * mean_se(a1).se);
    EXPECT_NEAR(mean_se(a2).mean, 0.0, 4 * mean_se(a2).se);
}

TEST(EstimatedCoefficients, ConsistentAlongN) {
    const double target = -3.0 / 7.0;
    double prev = 1e9;
    for (std::size_t n : {512u, 2048u, 8192u}) {
        const auto paths = sample_batch(fn(0.3), n, 200, n);
        std::vector<double> err(paths.size());
        for (std::size_t r = 0; r < paths.size(); ++r)
            err[r] = std::abs(estimated_coefficients(paths[r], 1, 1).a[0] - target);
        const double m = mean_se(err).mean;
        EXPECT_LT(m, prev) << n;
        prev = m;
    }
}

TEST(EstimatedCoefficients, SingularCarriesContext) {
    const std::vector<double> x(10, 0.0);
    try {
        estimated_coefficients(x, 2, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
        EXPECT_NE(std::string(e.what()).find("n=10, k=2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(estimated_coefficients(std::vector<double>{1, 2, 3}, 3, 2), Error);
}

TEST(PredictTheoretical, Examples) {
    const auto c = theoretical_coefficients(fn(0.3), 1);
    const std::vector<double> zero{0.0}, one{2.0};
    EXPECT_EQ(predict_theoretical(zero, c), 0.0);
    EXPECT_NEAR(predict_theoretical(one, c), 2.0 * 3.0 / 7.0, 1e-15);
    const auto w = theoretical_coefficients(fn(0.0), 3);
    EXPECT_EQ(predict_theoretical(std::vector<double>{1, -4, 9}, w), 0.0);
    EXPECT_THROW(predict_theoretical(std::vector<double>{1, 2}, c), Error);
}

TEST(PredictSameRealisation, ZeroPath) {
    EXPECT_EQ(predict_same_realisation(std::vector<double>(8, 0.0), 2, 3), 0.0);
}

TEST(PredictSameRealisation, WhiteNoiseMse) {
    const std::size_t n = 2000, k = 2, K = 3, R = 4000;
    const auto paths = sample_batch(fn(0.0), n + 1, R, 77);
    std::vector<double> sq(R);
    for (std::size_t r = 0; r < R; ++r) {
        const std::span<const double> x(paths[r].values.data(), n);
        const double e = paths[r].values[n] - predict_same_realisation(x, k, K);
        sq[r] = e * e;
    }
    const auto m = mean_se(sq);
    EXPECT_NEAR(m.mean, 1.0 + double(k) / (n - K + 1), 3 * m.se);
}

TEST(WienerKolmogorov, Examples) {
    const std::vector<double> x(50, 1.0);
    const auto w = predict_wiener_kolmogorov(fn(0.0), x, 50);
    EXPECT_EQ(w.value, 0.0);
    EXPECT_EQ(w.tail_bound, 0.0);
    const auto r = predict_wiener_kolmogorov(fn(0.3), std::vector<double>{1, 1}, 2);
    EXPECT_NEAR(r.value, 0.405, 1e-15);
    EXPECT_EQ(r.terms, 2u);
    EXPECT_GT(r.tail_bound, 0.0);
}

TEST(WienerKolmogorov, GammaRatioWeights) {
    const double d = 0.35;
    const auto x = sample(fn(d), 3000, 5).values;
    const auto w = predict_wiener_kolmogorov(fn(d), x, x.size());
    double ref = 0.0;  // -sum a_j X_{n+1-j}, a_j = Gamma(j-d) / (Gamma(j+1) Gamma(-d))
    for (std::size_t j = 1; j <= x.size(); ++j)
        ref += std::exp(std::lgamma(j - d) - std::lgamma(j + 1.0) - std::lgamma(-d)) * x[x.size() - j];
    EXPECT_NEAR(w.value, ref, 1e-10);
}

TEST(DecomposeError, WhiteNoise) {
    const auto p = sample_with_innovations(fn(0.0), 201, 0, 1);
    DecompositionInput in;
    in.history = std::span<const double>(p.history).first(200);
    in.n = 200;
    in.next = p.history.back();
    in.eps_next = p.innovations.back();
    in.k = 2;
    in.K_n = 3;
    in.J = 200;
    const auto dec = decompose_error(fn(0.0), in);
    EXPECT_EQ(dec.s_n_k, 0.0);
    EXPECT_NEAR(dec.error, *dec.eps_next + dec.f_k, 1e-12);
    EXPECT_NEAR(dec.f_k, -dec.prediction, 1e-12);
}

TEST(DecomposeError, IdentityBothRoutes) {
    ProcessSpec s = fn(0.3);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t n = 400, burn = 600;
        const auto p = sample_with_innovations(s, n + 1, burn, seed);
        DecompositionInput in;
        in.history = std::span<const double>(p.history).first(p.history.size() - 1);
        in.n = n;
        in.next = p.history.back();
        in.eps_next = p.innovations.back();
        in.k = 3;
        in.K_n = 5;
        in.J = in.history.size();
        const auto dec = decompose_error(s, in);
        const double lhs_resid = *dec.eps_next + dec.f_k + dec.s_n_k;
        EXPECT_NEAR(lhs_resid, dec.error, dec.truncation_bound + 1e-9);
        // definition route differs by exactly the index-mismatch term
        const double lhs_def = *dec.eps_next + dec.f_k_definition - dec.index_mismatch + dec.s_n_k;
        EXPECT_NEAR(lhs_def, dec.error, dec.truncation_bound + 1e-9) << seed;
    }
}

TEST(DecomposeError, InsufficientHistory) {
    const std::vector<double> h(100, 1.0);
    DecompositionInput in;
    in.history = h;
    in.n = 100;
    in.k = 1;
    in.K_n = 1;
    in.J = 101;
    EXPECT_THROW(decompose_error(fn(0.3), in), Error);
}

TEST(DecomposeError, VarianceOfSMatchesTheory) {
    const ProcessSpec s = fn(0.3);
    const std::size_t n = 300, burn = 1700, k = 4, R = 3000;
    std::vector<double> sv(R);
    for (std::size_t r = 0; r < R; ++r) {
        const auto p = sample_with_innovations(s, n + 1, burn, 1000 + r);
        DecompositionInput in;
        in.history = std::span<const double>(p.history).first(p.history.size() - 1);
        in.n = n;
        in.next = p.history.back();
        in.k = k;
        in.K_n = k;
        in.J = in.history.size();
        sv[r] = decompose_error(s, in).s_n_k;
    }
    std::vector<double> sq(R);
    for (std::size_t r = 0; r < R; ++r) sq[r] = sv[r] * sv[r];
    const auto m = mean_se(sq);
    // S is truncated at J = 2000 lags; E[S^2] counts every lag.
    EXPECT_NEAR(m.mean, projection_error_variance(s, k), 4 * m.se);
}
