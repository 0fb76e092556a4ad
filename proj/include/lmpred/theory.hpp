#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lmpred/model.hpp"
#include "lmpred/validation.hpp"

namespace lmpred {

/// E[S_n(k)^2] = v_k - sigma_eps^2 from the Levinson innovation variance.
double projection_error_variance(const ProcessSpec& spec, std::size_t k);
/// E[S_n(k)^2] for k = 1..max_order in one Levinson pass.
std::vector<double> projection_error_variances(const ProcessSpec& spec, std::size_t max_order);

struct QuadraticFormEstimate {
    double value = 0.0;       // (a - a_k)' Sigma_J (a - a_k) over i = 1..J
    double tail_bound = 0.0;  // bound on |E[S^2] - value| from the omitted a_i, i > J
};

/// Second route to E[S_n(k)^2]: the truncated quadratic form, for every
/// k = 1..max_order, from a single FFT Toeplitz product Sigma_J a.
std::vector<QuadraticFormEstimate> projection_error_quadratic(const ProcessSpec& spec, std::size_t max_order,
                                                              std::size_t J);

/// L_n(k) = E[S_n(k)^2] + k sigma_eps^2 / (n - K_n + 1).
double l_n(const ProcessSpec& spec, std::size_t n, std::size_t K_n, std::size_t k);

enum class Regime { Sub, Critical, Super };

struct RateRegime {
    Regime regime = Regime::Sub;
    double predicted_log_slope = -0.5;  // of E||Sigma_hat_n(k) - Sigma(k)|| against n
    bool log_corrected = false;          // sqrt(log n / n) law at d = 1/4
    std::string warning;                 // set near the critical point
};

const char* to_string(Regime r) noexcept;

RateRegime rate_regime(const ProcessSpec& spec);

/// Rate function h(n) with L constant: K^2/m (d < 1/4), K^2 log(m)/m (d = 1/4),
/// K^2 m^{4d-2} (d > 1/4), m = n - K_n + 1. E||Sigma_hat - Sigma||^q <= C h^{q/2}.
double rate_function(double d, std::size_t n, std::size_t K_n);

enum class Theorem { T2, T3 };

struct ScheduleOptions {
    double c = 1.0;
    double delta0 = 0.05;
};

/// Finite-n surrogates: T2 needs K^4 <= c n^{1-2d-delta0}; T3 needs K^4 <= c n
/// and K^{1+2d} <= c n^{1-2d-delta0}. Margins are rhs / lhs.
ValidationReport validate_schedule(const ProcessSpec& spec, std::size_t n, std::size_t K_n, Theorem theorem,
                                   const ScheduleOptions& opts = {});

struct InverseSBound {
    bool applicable = false;
    double value = 0.0;
    double constant = 0.0;
    std::string note;
};

/// C K^{2d+1+delta} with C chosen so the bound times E[S^2] equals 1 at the
/// reference order.
InverseSBound sigma_inv_s_bound(const ProcessSpec& spec, std::size_t K_n, double delta,
                                std::size_t reference_order = 4);

}  // namespace lmpred
