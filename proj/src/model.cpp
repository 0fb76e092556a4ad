#include "lmpred/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lmpred/error.hpp"

namespace lmpred {

namespace {

constexpr double kNearUnitRoot = 1e-6;

// Coefficients of (1 - z)^d (sign = -1) or (1 - z)^{-d} (sign = +1).
std::vector<double> fractional_series(double d, int sign, std::size_t count) {
    std::vector<double> c(count + 1);
    c[0] = 1.0;
    for (std::size_t j = 0; j < count; ++j) {
        const double jd = static_cast<double>(j);
        c[j + 1] = c[j] * (jd + sign * d) / (jd + 1.0);
    }
    return c;
}

std::vector<double> phi_polynomial(const ProcessSpec& spec) {
    std::vector<double> p{1.0};
    for (double phi : spec.ar) p.push_back(-phi);
    return p;
}

std::vector<double> theta_polynomial(const ProcessSpec& spec) {
    std::vector<double> p{1.0};
    for (double theta : spec.ma) p.push_back(theta);
    return p;
}

// First count+1 coefficients of series * poly.
std::vector<double> multiply_truncated(const std::vector<double>& series, const std::vector<double>& poly,
                                       std::size_t count) {
    std::vector<double> out(count + 1, 0.0);
    for (std::size_t j = 0; j <= count; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < poly.size() && i <= j; ++i) acc += poly[i] * series[j - i];
        out[j] = acc;
    }
    return out;
}

// Long division of a power series by a monic polynomial (poly[0] == 1).
std::vector<double> divide_truncated(const std::vector<double>& series, const std::vector<double>& poly) {
    std::vector<double> out(series.size(), 0.0);
    for (std::size_t j = 0; j < series.size(); ++j) {
        double acc = series[j];
        for (std::size_t i = 1; i < poly.size() && i <= j; ++i) acc -= poly[i] * out[j - i];
        out[j] = acc;
    }
    return out;
}

double min_root_modulus(std::span<const double> coeffs_after_one) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : polynomial_roots(coeffs_after_one)) m = std::min(m, std::abs(r));
    return m;
}

void require_invertible(std::span<const double> coeffs_after_one, const char* which) {
    const double m = min_root_modulus(coeffs_after_one);
    require(m >= 1.0 + kNearUnitRoot, ErrorKind::IllConditioned,
            std::string(which) + " polynomial has a root of modulus " + std::to_string(m) +
                " (need > 1 + 1e-6)");
}

std::vector<double> negated(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double x) { return -x; });
    return out;
}

// Envelope bound on sum_{j > J} c_j^2 assuming |c_j| <= C j^{-alpha}, alpha > 1/2,
// with C taken as the largest |c_j| j^alpha over the upper half of the stored range.
double envelope_tail_bound(const std::vector<double>& c, double alpha) {
    const std::size_t last = c.size() - 1;
    if (last == 0) return std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (std::size_t j = std::max<std::size_t>(1, last / 2); j <= last; ++j)
        scale = std::max(scale, std::abs(c[j]) * std::pow(static_cast<double>(j), alpha));
    const double jl = static_cast<double>(last);
    return scale * scale * std::pow(jl, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
}

// Fractional-noise autocovariance (sigma_eps^2 scaling included).
std::vector<double> fractional_noise_acvf(double d, double var_eps, std::size_t max_lag) {
    std::vector<double> g(max_lag + 1);
    g[0] = var_eps * std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
    for (std::size_t k = 0; k < max_lag; ++k) {
        const double kd = static_cast<double>(k);
        g[k + 1] = g[k] * (kd + d) / (kd + 1.0 - d);
    }
    return g;
}

}  // namespace

void check_spec(const ProcessSpec& spec) {
    require(std::isfinite(spec.d), ErrorKind::ParameterRange, "d must be finite");
    require(spec.d >= 0.0 && spec.d < 0.5, ErrorKind::ParameterRange,
            "d = " + std::to_string(spec.d) + " outside [0, 1/2)");
    require(std::isfinite(spec.sigma_eps) && spec.sigma_eps > 0.0, ErrorKind::ParameterRange,
            "sigma_eps must be positive");
    for (double c : spec.ar) require(std::isfinite(c), ErrorKind::Domain, "non-finite AR coefficient");
    for (double c : spec.ma) require(std::isfinite(c), ErrorKind::Domain, "non-finite MA coefficient");
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs_after_one) {
    std::size_t degree = coeffs_after_one.size();
    while (degree > 0 && coeffs_after_one[degree - 1] == 0.0) --degree;
    if (degree == 0) return {};
    // Companion matrix of z^m + (c_{m-1}/c_m) z^{m-1} + ... + 1/c_m.
    const double lead = coeffs_after_one[degree - 1];
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (std::size_t i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    companion(0, degree - 1) = -1.0 / lead;
    for (std::size_t i = 1; i < degree; ++i) companion(i, degree - 1) = -coeffs_after_one[i - 1] / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<std::complex<double>> roots;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) roots.push_back(solver.eigenvalues()[i]);
    return roots;
}

CoeffSeries ar_coefficients(const ProcessSpec& spec, std::size_t count) {
    check_spec(spec);
    require(count >= 1, ErrorKind::Contract, "ar_coefficients: count must be >= 1");
    CoeffSeries out;
    out.kind = SeriesKind::AR;
    if (spec.is_fractional_noise()) {
        out.values = fractional_series(spec.d, -1, count);
        if (spec.d > 0.0) {
            // |a_j| j^{1+d} is decreasing, so the tail is dominated by |a_J| (J/j)^{1+d}.
            const double aj = out.values[count];
            out.truncation_tail_bound = aj * aj * static_cast<double>(count) / (1.0 + 2.0 * spec.d);
        }
        return out;
    }
    require_invertible(spec.ma, "MA");
    const auto frac = fractional_series(spec.d, -1, count);
    out.values = divide_truncated(multiply_truncated(frac, phi_polynomial(spec), count), theta_polynomial(spec));
    out.truncation_tail_bound = envelope_tail_bound(out.values, 1.0 + spec.d);
    return out;
}

CoeffSeries ma_coefficients(const ProcessSpec& spec, std::size_t count) {
    check_spec(spec);
    require(count >= 1, ErrorKind::Contract, "ma_coefficients: count must be >= 1");
    CoeffSeries out;
    out.kind = SeriesKind::MA;
    if (spec.is_fractional_noise()) {
        out.values = fractional_series(spec.d, +1, count);
        if (spec.d > 0.0) {
            // b_j j^{1-d} increases to 1/Gamma(d).
            const double g = std::tgamma(spec.d);
            out.truncation_tail_bound =
                std::pow(static_cast<double>(count), 2.0 * spec.d - 1.0) / ((1.0 - 2.0 * spec.d) * g * g);
        }
        return out;
    }
    require_invertible(negated(spec.ar), "AR");
    const auto frac = fractional_series(spec.d, +1, count);
    out.values = divide_truncated(multiply_truncated(frac, theta_polynomial(spec), count), phi_polynomial(spec));
    out.truncation_tail_bound = envelope_tail_bound(out.values, 1.0 - spec.d);
    return out;
}

std::vector<double> autocovariance(const ProcessSpec& spec, std::size_t max_lag) {
    check_spec(spec);
    require(spec.d < 0.5 - 1e-6, ErrorKind::ParameterRange,
            "autocovariance truncation budget unreachable for d >= 1/2 - 1e-6");
    const double var_eps = spec.sigma_eps * spec.sigma_eps;
    if (spec.is_fractional_noise()) return fractional_noise_acvf(spec.d, var_eps, max_lag);

    // X = psi(B) Y with Y fractional noise and psi = theta / phi short memory, so
    // sigma_X(h) = sum_m r(m) sigma_Y(h - m), r the two-sided autocorrelation of psi.
    require_invertible(negated(spec.ar), "AR");
    const auto phi = phi_polynomial(spec);
    const auto theta = theta_polynomial(spec);
    std::vector<double> psi;
    double abs_sum = 0.0;
    constexpr std::size_t kWindow = 64;
    constexpr std::size_t kMaxTerms = 10'000'000;
    for (std::size_t j = 0;; ++j) {
        require(j < kMaxTerms, ErrorKind::IllConditioned, "ARMA impulse response does not decay");
        double v = j < theta.size() ? theta[j] : 0.0;
        for (std::size_t i = 1; i < phi.size() && i <= j; ++i) v -= phi[i] * psi[j - i];
        psi.push_back(v);
        abs_sum += std::abs(v);
        if (j + 1 >= std::max(phi.size(), theta.size()) + kWindow) {
            double recent = 0.0;
            for (std::size_t i = psi.size() - kWindow; i < psi.size(); ++i) recent += std::abs(psi[i]);
            if (recent < 1e-17 * abs_sum) break;
        }
    }
    const std::size_t reach = psi.size() - 1;
    std::vector<double> r(reach + 1, 0.0);
    for (std::size_t m = 0; m <= reach; ++m)
        for (std::size_t i = 0; i + m <= reach; ++i) r[m] += psi[i] * psi[i + m];

    const auto fn = fractional_noise_acvf(spec.d, var_eps, max_lag + reach);
    std::vector<double> g(max_lag + 1, 0.0);
    for (std::size_t h = 0; h <= max_lag; ++h) {
        double acc = r[0] * fn[h];
        for (std::size_t m = 1; m <= reach; ++m) {
            const std::size_t below = h >= m ? h - m : m - h;
            acc += r[m] * (fn[h + m] + fn[below]);
        }
        g[h] = acc;
    }
    return g;
}

double spectral_density(const ProcessSpec& spec, double freq) {
    require(std::isfinite(freq) && freq > -std::numbers::pi && freq <= std::numbers::pi, ErrorKind::Domain,
            "frequency outside (-pi, pi]");
    require(freq != 0.0, ErrorKind::Domain, "spectral density has a pole at frequency 0");
    const std::complex<double> z = std::polar(1.0, freq);
    std::complex<double> phi = 1.0, theta = 1.0, zp = 1.0;
    for (std::size_t i = 0; i < std::max(spec.ar.size(), spec.ma.size()); ++i) {
        zp *= z;
        if (i < spec.ar.size()) phi -= spec.ar[i] * zp;
        if (i < spec.ma.size()) theta += spec.ma[i] * zp;
    }
    const double gap = 2.0 * std::abs(std::sin(0.5 * freq));  // |1 - e^{i freq}|
    return spec.sigma_eps * spec.sigma_eps / (2.0 * std::numbers::pi) * std::norm(theta) / std::norm(phi) *
           std::pow(gap, -2.0 * spec.d);
}

std::vector<double> spectral_density(const ProcessSpec& spec, std::span<const double> freqs) {
    std::vector<double> out;
    out.reserve(freqs.size());
    for (double f : freqs) out.push_back(spectral_density(spec, f));
    return out;
}

double spectral_min_on_grid(const ProcessSpec& spec, std::size_t grid) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= grid; ++i)
        m = std::min(m, spectral_density(spec, std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid)));
    return m;
}

ValidationReport validate_assumptions(const ProcessSpec& spec, const AssumptionOptions& opts) {
    ValidationReport report;

    Check d_range{"d_range", spec.d > 0.0 && spec.d < 0.5, spec.d, 0.5, "require 0 < d < 1/2"};
    if (spec.d == 0.0) d_range.detail = "d = 0 is the short-memory escape hatch, not a long-memory model";
    report.checks.push_back(d_range);

    const double phi_mod = min_root_modulus(negated(spec.ar));
    const double theta_mod = min_root_modulus(spec.ma);
    const double root_mod = std::min(phi_mod, theta_mod);
    const bool roots_ok = root_mod > 1.0 + opts.root_tolerance;
    report.checks.push_back({"root_condition", roots_ok, root_mod, 1.0 + opts.root_tolerance,
                             "smallest root modulus of phi and theta"});

    Check spectral{"spectral_lower_bound", false, 0.0, 0.0, "min of f on (0, pi] grid"};
    if (std::isfinite(spec.sigma_eps) && spec.sigma_eps > 0.0) {
        spectral.value = spectral_min_on_grid(spec, opts.spectral_grid);
        spectral.passed = spectral.value > 0.0 && std::isfinite(spectral.value);
    } else {
        spectral.detail = "sigma_eps must be positive";
    }
    report.checks.push_back(spectral);

    Check decay{"ar_decay_rate", false, 0.0, -spec.d - 1.0, ""};
    if (!(spec.d > 0.0)) {
        decay.detail = "not applicable: no hyperbolic decay without long memory";
    } else if (!roots_ok) {
        decay.detail = "skipped: root condition failed";
    } else if (opts.decay_fit_lo < 1 || opts.decay_fit_hi <= opts.decay_fit_lo) {
        decay.detail = "invalid fit range";
    } else {
        const auto frac = fractional_series(spec.d, -1, opts.decay_fit_hi);
        const auto a = spec.is_fractional_noise()
                           ? frac
                           : divide_truncated(multiply_truncated(frac, phi_polynomial(spec), opts.decay_fit_hi),
                                              theta_polynomial(spec));
        double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
        for (std::size_t j = opts.decay_fit_lo; j <= opts.decay_fit_hi; ++j) {
            if (a[j] == 0.0) continue;
            const double x = std::log(static_cast<double>(j)), y = std::log(std::abs(a[j]));
            sx += x, sy += y, sxx += x * x, sxy += x * y, m += 1;
        }
        if (m >= 2) {
            decay.value = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            decay.passed = std::abs(decay.value - decay.threshold) <= opts.decay_slope_tolerance;
            decay.detail = "log-log slope of |a_j| vs expected -d-1";
        } else {
            decay.detail = "no nonzero coefficients in fit range";
        }
    }
    report.checks.push_back(decay);
    return report;
}

}  // namespace lmpred
