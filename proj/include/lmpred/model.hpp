#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lmpred/validation.hpp"

/// Stationary Gaussian FARIMA(p, d, q) processes
///
///     phi(B) (1 - B)^d X_t = theta(B) eps_t,
///
/// with phi(z) = 1 - phi_1 z - ... - phi_p z^p and
/// theta(z) = 1 + theta_1 z + ... + theta_q z^q.
namespace lmpred {

struct ProcessSpec {
    double d = 0.0;
    double sigma_eps = 1.0;
    std::vector<double> ar;  // phi_1..phi_p
    std::vector<double> ma;  // theta_1..theta_q

    bool is_fractional_noise() const { return ar.empty() && ma.empty(); }
    /// d == 0 is only admitted so white-noise controls share code paths.
    bool is_short_memory_escape() const { return d == 0.0; }
    bool operator==(const ProcessSpec&) const = default;
};

/// Throws ParameterRange / Domain errors for specs outside 0 <= d < 1/2,
/// sigma_eps <= 0, or non-finite values.
void check_spec(const ProcessSpec& spec);

enum class SeriesKind { AR, MA };

/// Power-series coefficients of the AR(inf) or MA(inf) representation.
struct CoeffSeries {
    SeriesKind kind = SeriesKind::AR;
    std::vector<double> values;          // values[0] == 1
    double truncation_tail_bound = 0.0;  // bound on sum_{j > J} c_j^2
};

/// a_0..a_count of eps_t = sum_j a_j X_{t-j}, i.e. phi(z)(1-z)^d / theta(z).
CoeffSeries ar_coefficients(const ProcessSpec& spec, std::size_t count);

/// b_0..b_count of X_t = sum_j b_j eps_{t-j}, i.e. theta(z)(1-z)^{-d} / phi(z).
CoeffSeries ma_coefficients(const ProcessSpec& spec, std::size_t count);

/// sigma(0)..sigma(max_lag).
std::vector<double> autocovariance(const ProcessSpec& spec, std::size_t max_lag);

/// Spectral density at each frequency in (-pi, pi] \ {0}.
std::vector<double> spectral_density(const ProcessSpec& spec, std::span<const double> freqs);
double spectral_density(const ProcessSpec& spec, double freq);

/// Minimum of the spectral density over a uniform grid on [pi/grid, pi].
double spectral_min_on_grid(const ProcessSpec& spec, std::size_t grid = 4096);

/// Roots of 1 + c_1 z + ... + c_m z^m (coefficients in that sign convention).
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs_after_one);

struct AssumptionOptions {
    double root_tolerance = 1e-9;
    std::size_t spectral_grid = 4096;
    std::size_t decay_fit_lo = 64;
    std::size_t decay_fit_hi = 4096;
    double decay_slope_tolerance = 0.05;
};

ValidationReport validate_assumptions(const ProcessSpec& spec, const AssumptionOptions& opts = {});

}  // namespace lmpred
