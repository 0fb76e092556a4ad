#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>

#include "lmpred/coeffs.hpp"
#include "lmpred/model.hpp"
#include "lmpred/simulate.hpp"
#include "lmpred/toeplitz.hpp"

namespace lmpred {

/// Order-k finite-past projection coefficients with v_1..v_k.
PredictorCoeffs theoretical_coefficients(const ProcessSpec& spec, std::size_t k);

/// Sigma_hat_n(K) and the cross moments
///   c_r = (n - K_n + 1)^{-1} sum_{j=K_n}^{n-1} X_{j-r+1} X_{j+1},  r = 1..K.
/// Entries do not depend on the order, so every k <= K solves with the
/// leading k x k block.
struct EstimationMoments {
    EmpiricalCov cov;
    Eigen::VectorXd cross;
};

EstimationMoments estimation_moments(std::span<const double> x, std::size_t max_order, std::size_t K_n);

/// Coefficients of order k from precomputed moments (k <= moments order).
PredictorCoeffs solve_estimated(const EstimationMoments& moments, std::size_t k);

/// a_hat(k) = -Sigma_hat_n(k)^{-1} c(k). Needs 1 <= k <= K_n <= n - 1.
PredictorCoeffs estimated_coefficients(std::span<const double> x, std::size_t k, std::size_t K_n);
PredictorCoeffs estimated_coefficients(const SamplePath& path, std::size_t k, std::size_t K_n);

/// sum_j (-a_j) X_{n+1-j}; window holds X_{n-k+1}..X_n in time order.
double predict_theoretical(std::span<const double> window, const PredictorCoeffs& coeffs);

/// X_hat_{n+1}(k) = X_n(k)' a_hat(k) with coefficients estimated on x itself.
double predict_same_realisation(std::span<const double> x, std::size_t k, std::size_t K_n);
double predict_same_realisation(const SamplePath& path, std::size_t k, std::size_t K_n);

struct WienerKolmogorovPrediction {
    double value = 0.0;
    double tail_bound = 0.0;   // (sum_{j>J} a_j^2)^{1/2} (mean x^2)^{1/2}
    std::size_t terms = 0;     // J actually used
};

/// -sum_{j=1}^{J} a_j X_{n+1-j} with J = min(n, truncation).
WienerKolmogorovPrediction predict_wiener_kolmogorov(const ProcessSpec& spec, std::span<const double> x,
                                                     std::size_t truncation);
/// Same with AR coefficients supplied (ar.values.size() - 1 >= min(n, truncation)).
WienerKolmogorovPrediction predict_wiener_kolmogorov(const CoeffSeries& ar, std::span<const double> x,
                                                     std::size_t truncation);

inline std::size_t default_s_truncation(std::size_t k) { return std::max<std::size_t>(std::size_t{1} << 14, 32 * k); }

struct DecompositionInput {
    std::span<const double> history;  // ..., X_{n-1}, X_n; the last n values are the estimation sample
    std::size_t n = 0;
    double next = 0.0;                // X_{n+1}
    std::optional<double> eps_next;   // epsilon_{n+1} when the sampler exposes it
    std::size_t k = 1;
    std::size_t K_n = 1;
    std::size_t J = 0;                // terms of the S_n(k) sum; needs history.size() >= J
};

/// X_{n+1} - X_hat_{n+1}(k) = eps_{n+1} + f(k) + S_n(k).
struct ErrorDecomposition {
    std::optional<double> eps_next;
    double f_k = 0.0;           // residual route if eps is known, otherwise the definition route
    double f_k_definition = 0.0;
    double s_n_k = 0.0;
    double truncation_bound = 0.0;  // recorded bound on the omitted part of S_n(k)
    double prediction = 0.0;        // X_hat_{n+1}(k)
    double error = 0.0;             // X_{n+1} - X_hat_{n+1}(k)
    /// The cross moments stop at j = n - 1 while Sigma_hat_n(k) runs to n, so
    /// the definition route exceeds X_tilde(k) - X_hat(k) by exactly
    /// (X_n' Sigma_hat^{-1} X_n)(X_n' a_k) / (n - K_n + 1).
    double index_mismatch = 0.0;
};

ErrorDecomposition decompose_error(const ProcessSpec& spec, const DecompositionInput& in);

}  // namespace lmpred
