#include "lmpred/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lmpred/error.hpp"
#include "lmpred/toeplitz.hpp"

namespace lmpred {

namespace {
constexpr double kCriticalTolerance = 1e-9;
constexpr double kNearCriticalWarning = 0.02;
}  // namespace

std::vector<double> projection_error_variances(const ProcessSpec& spec, std::size_t max_order) {
    require(max_order >= 1, ErrorKind::Contract, "projection_error_variance: k must be >= 1");
    const auto coeffs = levinson_solve(autocovariance(spec, max_order));
    const double var_eps = spec.sigma_eps * spec.sigma_eps;
    std::vector<double> out(max_order);
    for (std::size_t k = 0; k < max_order; ++k) out[k] = std::max(0.0, coeffs.innovation_variances[k] - var_eps);
    return out;
}

double projection_error_variance(const ProcessSpec& spec, std::size_t k) {
    return projection_error_variances(spec, k).back();
}

std::vector<QuadraticFormEstimate> projection_error_quadratic(const ProcessSpec& spec, std::size_t max_order,
                                                              std::size_t J) {
    require(max_order >= 1 && J >= max_order, ErrorKind::Contract, "projection_error_quadratic: need 1 <= k <= J");
    const auto ar = ar_coefficients(spec, J);
    const auto acvf = autocovariance(spec, J);
    // Q(k) = a' S a - 2 a_k' (S a)_{1..k} + a_k' S_k a_k, with a = (a_1..a_J).
    const std::span<const double> a(ar.values.data() + 1, J);
    const auto sa = toeplitz_matvec(std::span<const double>(acvf.data(), J), a);
    double asa = 0.0;
    for (std::size_t i = 0; i < J; ++i) asa += a[i] * sa[i];

    // Tail: T = sigma(0) (sum_{i>J} |a_i|)^2, and |E S^2 - Q_J| <= 2 sqrt(Q_J T) + T.
    double abs_tail = 0.0;
    if (spec.d > 0.0 && spec.is_fractional_noise()) {
        // a_i < 0 for i >= 1 and sum_{i>=0} a_i = 0, so the tail is 1 + sum_{i<=J} a_i.
        abs_tail = 1.0;
        for (std::size_t i = 1; i <= J; ++i) abs_tail += ar.values[i];
        abs_tail = std::abs(abs_tail);
    } else if (spec.d > 0.0 || !spec.is_fractional_noise()) {
        const double alpha = spec.d > 0.0 ? 1.0 + spec.d : 2.0;
        double scale = 0.0;
        for (std::size_t j = std::max<std::size_t>(1, J / 2); j <= J; ++j)
            scale = std::max(scale, std::abs(ar.values[j]) * std::pow(static_cast<double>(j), alpha));
        abs_tail = scale * std::pow(static_cast<double>(J), 1.0 - alpha) / (alpha - 1.0);
    }
    const double T = acvf[0] * abs_tail * abs_tail;

    std::vector<QuadraticFormEstimate> out;
    out.reserve(max_order);
    for (std::size_t k = 1; k <= max_order; ++k) {
        // a_k by Cholesky rather than Levinson, keeping this route independent.
        const ToeplitzCov cov{std::vector<double>(acvf.begin(), acvf.begin() + static_cast<std::ptrdiff_t>(k))};
        const Eigen::MatrixXd dense = cov.dense();
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(acvf.data() + 1, static_cast<Eigen::Index>(k));
        const Eigen::VectorXd ak = -dense_solve(dense, rhs).x;
        double cross = 0.0;
        for (std::size_t i = 0; i < k; ++i) cross += ak(static_cast<Eigen::Index>(i)) * sa[i];
        const double inner = ak.dot(dense * ak);
        const double q = std::max(0.0, asa - 2.0 * cross + inner);
        out.push_back({q, 2.0 * std::sqrt(q * T) + T});
    }
    return out;
}

double l_n(const ProcessSpec& spec, std::size_t n, std::size_t K_n, std::size_t k) {
    require(k >= 1 && k <= K_n && K_n <= n, ErrorKind::Contract, "l_n: need 1 <= k <= K_n <= n");
    return projection_error_variance(spec, k) +
           static_cast<double>(k) * spec.sigma_eps * spec.sigma_eps / static_cast<double>(n - K_n + 1);
}

const char* to_string(Regime r) noexcept {
    switch (r) {
        case Regime::Sub: return "sub";
        case Regime::Critical: return "critical";
        case Regime::Super: return "super";
    }
    return "?";
}

RateRegime rate_regime(const ProcessSpec& spec) {
    require(spec.d > 0.0 && spec.d < 0.5, ErrorKind::ParameterRange, "rate_regime: d must lie in (0, 1/2)");
    RateRegime out;
    if (std::abs(spec.d - 0.25) <= kCriticalTolerance) {
        out.regime = Regime::Critical;
        out.predicted_log_slope = -0.5;
        out.log_corrected = true;
    } else if (spec.d < 0.25) {
        out.regime = Regime::Sub;
        out.predicted_log_slope = -0.5;
    } else {
        out.regime = Regime::Super;
        out.predicted_log_slope = 2.0 * spec.d - 1.0;
    }
    if (out.regime != Regime::Critical && std::abs(spec.d - 0.25) < kNearCriticalWarning)
        out.warning = "d is close to 1/4; fitted rates will show crossover between regimes";
    return out;
}

double rate_function(double d, std::size_t n, std::size_t K_n) {
    require(K_n >= 1 && K_n <= n, ErrorKind::Contract, "rate_function: need 1 <= K_n <= n");
    const double m = static_cast<double>(n - K_n + 1);
    const double k2 = static_cast<double>(K_n) * static_cast<double>(K_n);
    if (std::abs(d - 0.25) <= kCriticalTolerance) return k2 * std::log(m) / m;
    if (d < 0.25) return k2 / m;
    return k2 * std::pow(m, 4.0 * d - 2.0);
}

ValidationReport validate_schedule(const ProcessSpec& spec, std::size_t n, std::size_t K_n, Theorem theorem,
                                   const ScheduleOptions& opts) {
    ValidationReport report;
    const double K = static_cast<double>(K_n), nd = static_cast<double>(n), d = spec.d;
    const double rhs_main = opts.c * std::pow(nd, 1.0 - 2.0 * d - opts.delta0);
    auto add = [&](const std::string& name, double lhs, double rhs, const std::string& what) {
        report.checks.push_back({name, lhs <= rhs, rhs / lhs, 1.0, what + " (value = margin rhs/lhs)"});
    };
    if (theorem == Theorem::T2) {
        add("T2_K4", std::pow(K, 4.0), rhs_main, "K_n^4 <= c n^{1-2d-delta0}");
    } else {
        add("T3_K4", std::pow(K, 4.0), opts.c * nd, "K_n^4 <= c n");
        add("T3_K1p2d", std::pow(K, 1.0 + 2.0 * d), rhs_main, "K_n^{1+2d} <= c n^{1-2d-delta0}");
    }
    return report;
}

InverseSBound sigma_inv_s_bound(const ProcessSpec& spec, std::size_t K_n, double delta, std::size_t reference_order) {
    InverseSBound out;
    if (!(spec.d > 0.0)) {
        out.note = "inapplicable: E[S^2] = 0 without long memory";
        return out;
    }
    require(K_n >= 1 && reference_order >= 1 && delta >= 0.0, ErrorKind::Contract, "sigma_inv_s_bound: bad arguments");
    const double expo = 2.0 * spec.d + 1.0 + delta;
    const double ref = projection_error_variance(spec, reference_order);
    out.constant = 1.0 / (ref * std::pow(static_cast<double>(reference_order), expo));
    out.value = out.constant * std::pow(static_cast<double>(K_n), expo);
    out.applicable = true;
    return out;
}

}  // namespace lmpred
