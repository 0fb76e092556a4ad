#include "lmpred/predict.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lmpred/error.hpp"

namespace lmpred {

PredictorCoeffs theoretical_coefficients(const ProcessSpec& spec, std::size_t k) {
    require(k >= 1, ErrorKind::Contract, "theoretical_coefficients: k must be >= 1");
    const auto acvf = autocovariance(spec, k);
    if (!spec.is_fractional_noise() || spec.d == 0.0) return levinson_solve(acvf);

    // Fractional noise: the partial autocorrelations are d / (j - d) in closed
    // form (Hosking 1981), so only the Durbin update is done numerically.
    PredictorCoeffs out;
    out.order = k;
    out.source.kind = CoeffSourceKind::Theoretical;
    std::vector<double> phi(k, 0.0), prev(k, 0.0);
    double v = acvf[0];
    for (std::size_t j = 1; j <= k; ++j) {
        const double rho = spec.d / (static_cast<double>(j) - spec.d);
        phi[j - 1] = rho;
        for (std::size_t i = 1; i < j; ++i) phi[i - 1] = prev[i - 1] - rho * prev[j - i - 1];
        v *= (1.0 - rho) * (1.0 + rho);
        out.reflection.push_back(rho);
        out.innovation_variances.push_back(v);
        std::copy_n(phi.begin(), j, prev.begin());
    }
    out.a.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.a[i] = -phi[i];
    out.v = v;
    return out;
}

EstimationMoments estimation_moments(std::span<const double> x, std::size_t max_order, std::size_t K_n) {
    const std::size_t n = x.size();
    require(max_order >= 1 && max_order <= K_n && n >= 1 && K_n <= n - 1, ErrorKind::Contract,
            "estimated coefficients need 1 <= k <= K_n <= n - 1 (k=" + std::to_string(max_order) +
                ", K_n=" + std::to_string(K_n) + ", n=" + std::to_string(n) + ")");
    EstimationMoments out{empirical_cov(x, max_order, K_n), Eigen::VectorXd::Zero(max_order)};
    const double m = static_cast<double>(n - K_n + 1);
    for (std::size_t r = 1; r <= max_order; ++r) {
        double acc = 0.0;
        for (std::size_t j = K_n; j <= n - 1; ++j) acc += x[j - r] * x[j];
        out.cross(r - 1) = acc / m;
    }
    return out;
}

PredictorCoeffs solve_estimated(const EstimationMoments& moments, std::size_t k) {
    require(k >= 1 && k <= moments.cov.k, ErrorKind::Contract, "solve_estimated: order exceeds moments");
    const auto kk = static_cast<Eigen::Index>(k);
    DenseSolveResult solved;
    try {
        solved = dense_solve(moments.cov.matrix.topLeftCorner(kk, kk), moments.cross.head(kk));
    } catch (const Error& e) {
        throw Error(e.kind(), "estimated coefficients (n=" + std::to_string(moments.cov.n) +
                                  ", k=" + std::to_string(k) + "): " + e.what());
    }
    PredictorCoeffs out;
    out.order = k;
    out.a.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.a[i] = -solved.x(static_cast<Eigen::Index>(i));
    out.source = {CoeffSourceKind::Estimated, moments.cov.n, moments.cov.K_n, std::nullopt};
    return out;
}

PredictorCoeffs estimated_coefficients(std::span<const double> x, std::size_t k, std::size_t K_n) {
    return solve_estimated(estimation_moments(x, k, K_n), k);
}

PredictorCoeffs estimated_coefficients(const SamplePath& path, std::size_t k, std::size_t K_n) {
    auto out = estimated_coefficients(std::span<const double>(path.values), k, K_n);
    out.source.seed = path.seed;
    return out;
}

double predict_theoretical(std::span<const double> window, const PredictorCoeffs& coeffs) {
    require(window.size() == coeffs.order && coeffs.a.size() == coeffs.order, ErrorKind::Contract,
            "predict_theoretical: window length must equal the coefficient order");
    const std::size_t k = coeffs.order;
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc -= coeffs.a[j - 1] * window[k - j];
    return acc;
}

double predict_same_realisation(std::span<const double> x, std::size_t k, std::size_t K_n) {
    require(k >= 1 && k <= K_n && K_n + 1 <= x.size(), ErrorKind::Contract,
            "predict_same_realisation: need 1 <= k <= K_n <= n - 1");
    // Linear in the window, so a zero window predicts 0 whatever Sigma_hat is.
    const auto window = x.last(k);
    if (std::all_of(window.begin(), window.end(), [](double v) { return v == 0.0; })) return 0.0;
    const auto coeffs = estimated_coefficients(x, k, K_n);
    return predict_theoretical(x.last(k), coeffs);
}

double predict_same_realisation(const SamplePath& path, std::size_t k, std::size_t K_n) {
    return predict_same_realisation(std::span<const double>(path.values), k, K_n);
}

WienerKolmogorovPrediction predict_wiener_kolmogorov(const CoeffSeries& ar, std::span<const double> x,
                                                     std::size_t truncation) {
    const std::size_t n = x.size();
    require(n >= 1 && truncation >= 1, ErrorKind::Contract, "predict_wiener_kolmogorov: need n >= 1, J >= 1");
    const std::size_t J = std::min(n, truncation);
    require(ar.values.size() >= J + 1, ErrorKind::Contract, "predict_wiener_kolmogorov: too few AR coefficients");
    WienerKolmogorovPrediction out;
    out.terms = J;
    for (std::size_t j = 1; j <= J; ++j) out.value -= ar.values[j] * x[n - j];
    double tail = ar.truncation_tail_bound;
    for (std::size_t j = J + 1; j < ar.values.size(); ++j) tail += ar.values[j] * ar.values[j];
    if (tail > 0.0) {
        double second = 0.0;
        for (double v : x) second += v * v;
        out.tail_bound = std::sqrt(tail) * std::sqrt(second / static_cast<double>(n));
    }
    return out;
}

WienerKolmogorovPrediction predict_wiener_kolmogorov(const ProcessSpec& spec, std::span<const double> x,
                                                     std::size_t truncation) {
    require(!x.empty() && truncation >= 1, ErrorKind::Contract, "predict_wiener_kolmogorov: need n >= 1, J >= 1");
    return predict_wiener_kolmogorov(ar_coefficients(spec, std::min(x.size(), truncation)), x, truncation);
}

ErrorDecomposition decompose_error(const ProcessSpec& spec, const DecompositionInput& in) {
    const std::size_t H = in.history.size();
    require(in.n >= 2 && in.n <= H, ErrorKind::Contract, "decompose_error: need 2 <= n <= history length");
    require(in.J >= 1 && in.J <= H, ErrorKind::Contract,
            "decompose_error: insufficient history for J = " + std::to_string(in.J) + " (have " +
                std::to_string(H) + ")");
    const std::size_t n = in.n, k = in.k, K = in.K_n;
    const auto x = in.history.last(n);
    const auto theo = theoretical_coefficients(spec, k);
    const auto ar = ar_coefficients(spec, in.J);

    const auto moments = estimation_moments(x, k, K);
    const auto est = solve_estimated(moments, k);
    ErrorDecomposition out;
    out.prediction = predict_theoretical(x.last(k), est);
    out.error = in.next - out.prediction;
    out.eps_next = in.eps_next;

    // S_n(k) = -sum_{i=1}^{J} (a_i - a_{i,k}) X_{n+1-i}, a_{i,k} = 0 for i > k.
    double s = 0.0, second = 0.0;
    for (std::size_t i = 1; i <= in.J; ++i) {
        const double ak = i <= k ? theo.a[i - 1] : 0.0;
        s -= (ar.values[i] - ak) * in.history[H - i];
    }
    for (double v : in.history) second += v * v;
    out.s_n_k = s;
    out.truncation_bound = std::sqrt(ar.truncation_tail_bound) * std::sqrt(second / static_cast<double>(H));

    // Definition route: f(k) = -X_n(k)' Sigma_hat^{-1} (n-K+1)^{-1} sum_{j=K}^{n-1} X_j(k) eps_{j+1,k}.
    const double m = static_cast<double>(n - K + 1);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    for (std::size_t j = K; j <= n - 1; ++j) {
        double eps_jk = x[j];  // X_{j+1}
        for (std::size_t l = 1; l <= k; ++l) eps_jk += theo.a[l - 1] * x[j - l];
        for (std::size_t r = 1; r <= k; ++r) g(static_cast<Eigen::Index>(r - 1)) += x[j - r] * eps_jk;
    }
    g /= m;
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::MatrixXd cov = moments.cov.matrix.topLeftCorner(kk, kk);
    Eigen::VectorXd xn(kk);
    for (std::size_t r = 1; r <= k; ++r) xn(static_cast<Eigen::Index>(r - 1)) = x[n - r];
    out.f_k_definition = -xn.dot(dense_solve(cov, g).x);

    double xn_ak = 0.0;
    for (std::size_t r = 0; r < k; ++r) xn_ak += xn(static_cast<Eigen::Index>(r)) * theo.a[r];
    out.index_mismatch = xn.dot(dense_solve(cov, xn).x) * xn_ak / m;

    out.f_k = in.eps_next ? out.error - *in.eps_next - out.s_n_k : out.f_k_definition;
    return out;
}

}  // namespace lmpred
