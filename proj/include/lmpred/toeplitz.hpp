#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lmpred/coeffs.hpp"
#include "lmpred/model.hpp"

namespace lmpred {

/// Symmetric Toeplitz covariance Sigma(k), stored by its first column.
struct ToeplitzCov {
    std::vector<double> first_column;  // sigma(0)..sigma(k-1)

    std::size_t order() const { return first_column.size(); }
    double operator()(std::size_t i, std::size_t j) const { return first_column[i > j ? i - j : j - i]; }
    Eigen::MatrixXd dense() const;
};

/// Sigma_hat_n(k) = (n - K_n + 1)^{-1} sum_{j=K_n}^{n} X_j(k) X_j(k)',
/// X_j(k) = (X_j, ..., X_{j-k+1})'. Symmetric, not Toeplitz in general.
struct EmpiricalCov {
    Eigen::MatrixXd matrix;
    std::size_t n = 0;
    std::size_t K_n = 0;
    std::size_t k = 0;
};

ToeplitzCov theoretical_cov(const ProcessSpec& spec, std::size_t k);

/// Lag-recursive kernel: each lag's first entry is a dot product, the rest of
/// the diagonal follows by adding/removing one boundary product. Lags are
/// distributed over OpenMP threads (each lag is owned by one thread, so the
/// result does not depend on the thread count).
EmpiricalCov empirical_cov(std::span<const double> x, std::size_t k, std::size_t K_n);
/// Direct evaluation of the defining sum, kept as the reference.
EmpiricalCov empirical_cov_reference(std::span<const double> x, std::size_t k, std::size_t K_n);

/// Levinson-Durbin solution of Sigma(k) a = -(sigma(1), ..., sigma(k))' from
/// acvf = sigma(0)..sigma(k), with all intermediate innovation variances and
/// reflection coefficients. Throws SingularMatrix if some v_j <= 0.
PredictorCoeffs levinson_solve(std::span<const double> acvf);
/// Same solve with Sigma(k) given as a matrix; sigma(k) is the one lag the
/// k x k matrix does not contain.
PredictorCoeffs levinson_solve(const ToeplitzCov& cov, double sigma_k);

struct DenseSolveResult {
    Eigen::VectorXd x;
    bool ridge_applied = false;
};

/// Cholesky solve of a symmetric positive definite system, with a last-resort
/// ridge of 1e-12 trace/k.
DenseSolveResult dense_solve(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs);

/// Largest |eigenvalue| of a symmetric matrix (the norm sqrt(lambda_max(Y'Y))).
double spectral_norm(const Eigen::MatrixXd& symmetric);
/// sqrt(lambda_max(Y'Y)) for an arbitrary square matrix.
double operator_norm(const Eigen::MatrixXd& any);
/// (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> extreme_eigs(const Eigen::MatrixXd& symmetric);

/// y = T x with T the symmetric Toeplitz matrix of first_column (size J),
/// via a circulant embedding and FFT.
std::vector<double> toeplitz_matvec(std::span<const double> first_column, std::span<const double> x);
std::vector<double> toeplitz_matvec_reference(std::span<const double> first_column, std::span<const double> x);

}  // namespace lmpred
