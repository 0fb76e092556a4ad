#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lmpred/model.hpp"
#include "lmpred/theory.hpp"

namespace lmpred {

enum class KnKind {
    Fixed,      // K_n = fixed
    Default,    // max(2, floor(n^{min(0.2, (1-2d-0.05)/4)}))
    LargestT2,  // largest K_n passing the T2 surrogate, at least 1
    Power,      // max(1, floor(n^exponent))
};

struct KnRule {
    KnKind kind = KnKind::Default;
    std::size_t fixed = 2;
    double exponent = 0.08;
    ScheduleOptions schedule;

    std::size_t resolve(const ProcessSpec& spec, std::size_t n) const;
};

struct ExperimentConfig {
    ProcessSpec spec;
    std::vector<std::size_t> n_grid;
    std::vector<std::size_t> k_grid;  // mse: orders to score (empty = 1..K_n)
    KnRule kn_rule;
    std::size_t replicates = 1000;
    std::uint64_t master_seed = 1;
    std::vector<double> q_orders{1.0, 2.0};
    std::size_t k = 2;                   // covrate / momentbound: fixed order (K_n = k)
    std::size_t truncation_J = 0;        // clt: Wiener-Kolmogorov terms (0 = n)
    double normalization_scale = 1.0;    // clt: statistic divided by scale * sqrt(E S^2)
    bool weighted_fit = false;           // rate fits: weight log means by 1/SE^2
    int threads = 0;

    double slope_tolerance = 0.07;
    double mse_final_tolerance = 0.15;
    double max_exclusion_fraction = 0.01;
    double ks_p_threshold = 0.01;
    double clt_variance_tolerance = 0.05;
    double bound_terminal_tolerance = 0.5;
};

/// Throws Contract if grids are empty / not increasing or replicates < 100.
void check_config(const ExperimentConfig& config);

struct CellStat {
    std::string statistic;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t K_n = 0;
    double value = 0.0;
    double std_error = 0.0;
};

struct FitReport {
    std::string name;
    std::string model;  // "power" or "power*sqrt(log)"
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    double aic = 0.0;  // points * log(rss / points) + 2 * parameters
    std::size_t points = 0;
    double expected_slope = 0.0;
};

struct Verdict {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct QqRow {
    double p = 0.0;
    double theoretical = 0.0;
    double empirical = 0.0;
};

struct ExperimentReport {
    std::string experiment;
    ExperimentConfig config;
    std::uint64_t config_hash = 0;
    std::vector<CellStat> cells;
    std::vector<FitReport> fits;
    std::vector<Verdict> verdicts;
    std::vector<QqRow> qq;
    std::vector<std::string> warnings;
    std::size_t attempted = 0;
    std::size_t excluded = 0;

    bool passed() const;
    const CellStat* cell(const std::string& statistic, std::size_t n, std::size_t k = 0) const;
    const Verdict* verdict(const std::string& name) const;
    const FitReport* fit(const std::string& name) const;
};

/// Seed of replicate r in grid cell c: split_seed(split_seed(master, c), r).
std::uint64_t replicate_seed(std::uint64_t master, std::size_t cell, std::size_t replicate);

/// Same-realisation MSE against L_n(k). Two estimators of E(X_{n+1} - X_hat)^2:
///  direct: mean of (X_{n+1} - X_hat_{n+1}(k))^2 on paths of length n + 1;
///  control variate: with f = X_tilde(k) - X_hat(k) and S' = X_tilde(n) - X_tilde(k)
///    (X_tilde(n) the projection on the whole observed past),
///    MSE - sigma^2 = (v_k - sigma^2) + E[f^2 + 2 f S'],
///    unbiased because E[S'^2] = v_k - v_n and E(X_{n+1} - X_hat)^2 = v_n + E(f + S')^2.
/// Verdicts use the control-variate ratio.
ExperimentReport mse_experiment(const ExperimentConfig& config);

/// (X_tilde_{n+1} - X_hat_{n+1}(K_n)) / sqrt(E[S_n(K_n)^2]) against N(0, 1).
ExperimentReport clt_experiment(const ExperimentConfig& config);

/// E||Sigma_hat_n(k) - Sigma(k)|| and E||Sigma_hat_n^{-1}(k) - Sigma^{-1}(k)|| over
/// the n-grid, with log-log rate fits. Each replicate draws one path of length
/// max(n_grid) and evaluates its prefixes.
ExperimentReport covariance_rate_experiment(const ExperimentConfig& config);

/// E[lambda_min^{-q}(Sigma_hat_n(k))] and E||Sigma_hat_n^{-1}(k)||^q over the
/// n-grid (nested prefixes as above).
ExperimentReport moment_bound_experiment(const ExperimentConfig& config);

}  // namespace lmpred
