#include "lmpred/toeplitz.hpp"

#include <fftw3.h>
#include <omp.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <string>

#include "fftw_lock.hpp"
#include "lmpred/error.hpp"

namespace lmpred {

namespace {

void check_window(std::size_t n, std::size_t k, std::size_t K_n) {
    require(k >= 1 && k <= K_n && K_n <= n, ErrorKind::Contract,
            "empirical_cov: need 1 <= k <= K_n <= n (k=" + std::to_string(k) + ", K_n=" + std::to_string(K_n) +
                ", n=" + std::to_string(n) + ")");
}

constexpr std::size_t kDenseEigenLimit = 512;

void require_symmetric(const Eigen::MatrixXd& m) {
    require(m.rows() == m.cols() && m.rows() >= 1, ErrorKind::Contract, "matrix must be square and non-empty");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorKind::Contract,
            "matrix must be symmetric");
}

}  // namespace

Eigen::MatrixXd ToeplitzCov::dense() const {
    const auto k = static_cast<Eigen::Index>(order());
    Eigen::MatrixXd m(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            m(i, j) = (*this)(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return m;
}

ToeplitzCov theoretical_cov(const ProcessSpec& spec, std::size_t k) {
    require(k >= 1, ErrorKind::Contract, "theoretical_cov: k must be >= 1");
    return ToeplitzCov{autocovariance(spec, k - 1)};
}

EmpiricalCov empirical_cov_reference(std::span<const double> x, std::size_t k, std::size_t K_n) {
    const std::size_t n = x.size();
    check_window(n, k, K_n);
    EmpiricalCov out{Eigen::MatrixXd::Zero(k, k), n, K_n, k};
    const double m = static_cast<double>(n - K_n + 1);
    // 1-based: entry(r, s) = sum_{j=K_n}^{n} X_{j-r+1} X_{j-s+1}; X_t is x[t-1].
    for (std::size_t r = 1; r <= k; ++r)
        for (std::size_t s = r; s <= k; ++s) {
            double acc = 0.0;
            for (std::size_t j = K_n; j <= n; ++j) acc += x[j - r] * x[j - s];
            out.matrix(r - 1, s - 1) = acc / m;
            out.matrix(s - 1, r - 1) = acc / m;
        }
    return out;
}

EmpiricalCov empirical_cov(std::span<const double> x, std::size_t k, std::size_t K_n) {
    const std::size_t n = x.size();
    check_window(n, k, K_n);
    EmpiricalCov out{Eigen::MatrixXd::Zero(k, k), n, K_n, k};
    const double m = static_cast<double>(n - K_n + 1);
    const auto lags = static_cast<long long>(k);
    const bool go_parallel = !omp_in_parallel() && n * k >= (std::size_t{1} << 20);
#pragma omp parallel for schedule(static) if (go_parallel)
    for (long long lag_ll = 0; lag_ll < lags; ++lag_ll) {
        const auto lag = static_cast<std::size_t>(lag_ll);
        // Entry (r, r + lag), r = 1: sum_{j=K_n}^{n} x[j-1] x[j-1-lag].
        double acc = 0.0;
        for (std::size_t j = K_n; j <= n; ++j) acc += x[j - 1] * x[j - 1 - lag];
        out.matrix(0, lag) = acc;
        for (std::size_t r = 1; r + lag < k; ++r) {
            // Window shifts one step back in time.
            acc += x[K_n - 1 - r] * x[K_n - 1 - r - lag] - x[n - r] * x[n - r - lag];
            out.matrix(r, r + lag) = acc;
        }
    }
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t s = r; s < k; ++s) {
            out.matrix(r, s) /= m;
            out.matrix(s, r) = out.matrix(r, s);
        }
    return out;
}

PredictorCoeffs levinson_solve(std::span<const double> acvf) {
    require(acvf.size() >= 2, ErrorKind::Contract, "levinson_solve: need sigma(0)..sigma(k) with k >= 1");
    require(acvf[0] > 0.0, ErrorKind::SingularMatrix, "levinson_solve: sigma(0) must be positive");
    const std::size_t k = acvf.size() - 1;
    PredictorCoeffs out;
    out.order = k;
    out.source.kind = CoeffSourceKind::Theoretical;
    out.innovation_variances.reserve(k);
    out.reflection.reserve(k);

    // phi: forward predictor weights (X_hat = sum phi_i X_{t-i}); a = -phi.
    std::vector<double> phi(k, 0.0), prev(k, 0.0);
    double v = acvf[0];
    for (std::size_t j = 1; j <= k; ++j) {
        double num = acvf[j];
        for (std::size_t i = 1; i < j; ++i) num -= prev[i - 1] * acvf[j - i];
        const double rho = num / v;
        phi[j - 1] = rho;
        for (std::size_t i = 1; i < j; ++i) phi[i - 1] = prev[i - 1] - rho * prev[j - i - 1];
        v *= (1.0 - rho) * (1.0 + rho);
        require(v > 0.0, ErrorKind::SingularMatrix,
                "levinson_solve: non-positive innovation variance at order " + std::to_string(j));
        out.reflection.push_back(rho);
        out.innovation_variances.push_back(v);
        std::copy_n(phi.begin(), j, prev.begin());
    }
    out.a.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.a[i] = -phi[i];
    out.v = v;

    // Residual of Sigma(k) a + sigma_vec.
    double res2 = 0.0, rhs2 = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        double acc = acvf[r + 1];
        for (std::size_t c = 0; c < k; ++c) acc += acvf[r > c ? r - c : c - r] * out.a[c];
        res2 += acc * acc;
        rhs2 += acvf[r + 1] * acvf[r + 1];
    }
    require(std::sqrt(res2) <= 1e-9 * std::sqrt(rhs2) + 1e-300, ErrorKind::SingularMatrix,
            "levinson_solve: residual check failed (ill-conditioned Sigma(k))");
    return out;
}

PredictorCoeffs levinson_solve(const ToeplitzCov& cov, double sigma_k) {
    std::vector<double> acvf(cov.first_column);
    acvf.push_back(sigma_k);
    return levinson_solve(acvf);
}

DenseSolveResult dense_solve(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs) {
    require(matrix.rows() == matrix.cols() && matrix.rows() == rhs.size() && rhs.size() >= 1, ErrorKind::Contract,
            "dense_solve: dimension mismatch");
    DenseSolveResult out;
    Eigen::LLT<Eigen::MatrixXd> llt(matrix);
    Eigen::MatrixXd regularised;
    const Eigen::MatrixXd* used = &matrix;
    if (llt.info() != Eigen::Success) {
        regularised = matrix;
        regularised.diagonal().array() += 1e-12 * matrix.trace() / static_cast<double>(matrix.rows());
        llt.compute(regularised);
        require(llt.info() == Eigen::Success, ErrorKind::SingularMatrix,
                "dense_solve: Cholesky failed even with ridge");
        out.ridge_applied = true;
        used = &regularised;
    }
    out.x = llt.solve(rhs);
    Eigen::VectorXd residual = rhs - (*used) * out.x;
    if (residual.norm() > 1e-9 * rhs.norm()) {
        out.x += llt.solve(residual);  // one step of iterative refinement
        residual = rhs - (*used) * out.x;
    }
    require(residual.norm() <= 1e-9 * rhs.norm(), ErrorKind::SingularMatrix,
            "dense_solve: residual check failed");
    return out;
}

std::pair<double, double> extreme_eigs(const Eigen::MatrixXd& symmetric) {
    require_symmetric(symmetric);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();  // ascending
    return {ev(0), ev(ev.size() - 1)};
}

double spectral_norm(const Eigen::MatrixXd& symmetric) {
    require_symmetric(symmetric);
    if (symmetric.rows() <= static_cast<Eigen::Index>(kDenseEigenLimit)) {
        const auto [lo, hi] = extreme_eigs(symmetric);
        return std::max(std::abs(lo), std::abs(hi));
    }
    // Power iteration on A^2 (its top eigenvalue is max |lambda|^2).
    Eigen::VectorXd v = Eigen::VectorXd::Ones(symmetric.rows()).normalized();
    double estimate = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd w = symmetric * (symmetric * v);
        const double next = std::sqrt(w.norm());
        if (next == 0.0) return 0.0;
        v = w / w.norm();
        if (std::abs(next - estimate) <= 1e-10 * next) return next;
        estimate = next;
    }
    return estimate;
}

double operator_norm(const Eigen::MatrixXd& any) {
    require(any.rows() >= 1 && any.cols() >= 1, ErrorKind::Contract, "operator_norm: empty matrix");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(any);
    return svd.singularValues()(0);
}

std::vector<double> toeplitz_matvec_reference(std::span<const double> first_column, std::span<const double> x) {
    require(first_column.size() == x.size(), ErrorKind::Contract, "toeplitz_matvec: size mismatch");
    const std::size_t J = x.size();
    std::vector<double> y(J, 0.0);
    for (std::size_t i = 0; i < J; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < J; ++j) acc += first_column[i > j ? i - j : j - i] * x[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> toeplitz_matvec(std::span<const double> first_column, std::span<const double> x) {
    require(first_column.size() == x.size(), ErrorKind::Contract, "toeplitz_matvec: size mismatch");
    const std::size_t J = x.size();
    if (J == 0) return {};
    const std::size_t m = std::bit_ceil(2 * J);
    const std::size_t bins = m / 2 + 1;
    // Circulant first column: c_0..c_{J-1}, zero padding, then c_{J-1}..c_1.
    std::vector<double> c(m, 0.0), xp(m, 0.0);
    for (std::size_t j = 0; j < J; ++j) c[j] = first_column[j];
    for (std::size_t j = 1; j < J; ++j) c[m - j] = first_column[j];
    std::copy(x.begin(), x.end(), xp.begin());
    std::vector<std::complex<double>> fc(bins), fx(bins);
    std::vector<double> y(m);
    fftw_plan pc, px, back;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        pc = fftw_plan_dft_r2c_1d(static_cast<int>(m), c.data(), reinterpret_cast<fftw_complex*>(fc.data()),
                                  FFTW_ESTIMATE);
        px = fftw_plan_dft_r2c_1d(static_cast<int>(m), xp.data(), reinterpret_cast<fftw_complex*>(fx.data()),
                                  FFTW_ESTIMATE);
        back = fftw_plan_dft_c2r_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(fx.data()), y.data(),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(pc);
    fftw_execute(px);
    for (std::size_t i = 0; i < bins; ++i) fx[i] *= fc[i];
    fftw_execute(back);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(pc);
        fftw_destroy_plan(px);
        fftw_destroy_plan(back);
    }
    y.resize(J);
    const double inv = 1.0 / static_cast<double>(m);
    for (double& v : y) v *= inv;
    return y;
}

}  // namespace lmpred
