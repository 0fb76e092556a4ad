#include "lmpred/experiments.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "lmpred/error.hpp"
#include "lmpred/io.hpp"
#include "lmpred/parallel.hpp"
#include "lmpred/predict.hpp"
#include "lmpred/rng.hpp"
#include "lmpred/simulate.hpp"
#include "lmpred/stats.hpp"
#include "lmpred/toeplitz.hpp"

namespace lmpred {

std::size_t KnRule::resolve(const ProcessSpec& spec, std::size_t n) const {
    const double nd = static_cast<double>(n);
    switch (kind) {
        case KnKind::Fixed: return fixed;
        case KnKind::Default: {
            const double expo = std::min(0.2, (1.0 - 2.0 * spec.d - 0.05) / 4.0);
            return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(std::pow(nd, expo))));
        }
        case KnKind::LargestT2: {
            const double rhs = schedule.c * std::pow(nd, 1.0 - 2.0 * spec.d - schedule.delta0);
            auto K = static_cast<std::size_t>(std::floor(std::pow(rhs, 0.25)));
            while (K > 1 && std::pow(static_cast<double>(K), 4.0) > rhs) --K;  // guard pow rounding
            return std::max<std::size_t>(1, K);
        }
        case KnKind::Power:
            return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(nd, exponent))));
    }
    return fixed;
}

void check_config(const ExperimentConfig& config) {
    check_spec(config.spec);
    require(!config.n_grid.empty(), ErrorKind::Contract, "experiment: n_grid is empty");
    require(std::is_sorted(config.n_grid.begin(), config.n_grid.end()) &&
                std::adjacent_find(config.n_grid.begin(), config.n_grid.end()) == config.n_grid.end(),
            ErrorKind::Contract, "experiment: n_grid must be strictly increasing");
    require(std::is_sorted(config.k_grid.begin(), config.k_grid.end()) &&
                std::adjacent_find(config.k_grid.begin(), config.k_grid.end()) == config.k_grid.end(),
            ErrorKind::Contract, "experiment: k_grid must be strictly increasing");
    require(config.replicates >= 100, ErrorKind::Contract, "experiment: replicates must be >= 100");
    require(config.normalization_scale > 0.0, ErrorKind::Contract, "experiment: normalization scale must be > 0");
}

bool ExperimentReport::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

const CellStat* ExperimentReport::cell(const std::string& statistic, std::size_t n, std::size_t k) const {
    for (const auto& c : cells)
        if (c.statistic == statistic && c.n == n && c.k == k) return &c;
    return nullptr;
}

const Verdict* ExperimentReport::verdict(const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return &v;
    return nullptr;
}

const FitReport* ExperimentReport::fit(const std::string& name) const {
    for (const auto& f : fits)
        if (f.name == name) return &f;
    return nullptr;
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t cell, std::size_t replicate) {
    return split_seed(split_seed(master, cell), replicate);
}

namespace {

ExperimentReport start_report(const char* name, const ExperimentConfig& config) {
    check_config(config);
    ExperimentReport r;
    r.experiment = name;
    r.config = config;
    r.config_hash = config_hash(config);
    return r;
}

void add_exclusion_verdict(ExperimentReport& report) {
    const double frac =
        report.attempted ? static_cast<double>(report.excluded) / static_cast<double>(report.attempted) : 0.0;
    report.verdicts.push_back({"exclusions", frac <= report.config.max_exclusion_fraction, frac,
                               report.config.max_exclusion_fraction,
                               std::to_string(report.excluded) + " of " + std::to_string(report.attempted) +
                                   " replicates excluded (singular Sigma_hat)"});
}

bool is_singular(const Error& e) { return e.kind() == ErrorKind::SingularMatrix; }

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    require(llt.info() == Eigen::Success, ErrorKind::SingularMatrix, "Sigma_hat not positive definite");
    return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

// Column j of a replicate-major table, skipping excluded replicates.
template <class Row, class Get>
std::vector<double> column(const std::vector<std::optional<Row>>& rows, Get&& get) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        if (r) out.push_back(get(*r));
    return out;
}

double dot_reversed(const std::vector<double>& a, std::span<const double> x, std::size_t terms) {
    // -sum_{j=1}^{terms} a[j-1] x[n-j]
    const std::size_t n = x.size();
    double acc = 0.0;
    for (std::size_t j = 1; j <= terms; ++j) acc -= a[j - 1] * x[n - j];
    return acc;
}

// Linearised f(k) S' control variate. With u = c_hat + Sigma_hat a_k we have
// a_hat - a_k = -Sigma_hat^{-1} u, so f ~ -u' Sigma^{-1} X_n(k) =: f_lin. The mean
// of h = f_lin S' follows from Isserlis: S' = e_{n+1} - eta with eta orthogonal to
// X_1..X_n, and e_t = X_t + a_k' X_{t-1}(k) the order-k residual.
struct LinearControl {
    Eigen::MatrixXd sigma_inv;
    double mean = 0.0;
};

LinearControl linear_control(const std::vector<double>& acvf, const std::vector<double>& a, std::size_t n,
                             std::size_t K) {
    const std::size_t k = a.size();
    const auto sig = [&](long h) { return acvf[static_cast<std::size_t>(std::labs(h))]; };
    const auto gamma_e = [&](long h) {  // Cov(X_t, e_{t+h})
        double g = sig(h);
        for (std::size_t l = 1; l <= k; ++l) g += a[l - 1] * sig(h - static_cast<long>(l));
        return g;
    };
    std::vector<double> alpha(k + 1, 1.0);
    for (std::size_t l = 1; l <= k; ++l) alpha[l] = a[l - 1];
    const auto rho_e = [&](long h) {  // Cov(e_t, e_{t+h})
        double acc = 0.0;
        for (std::size_t l = 0; l <= k; ++l)
            for (std::size_t q = 0; q <= k; ++q)
                acc += alpha[l] * alpha[q] * sig(h + static_cast<long>(l) - static_cast<long>(q));
        return acc;
    };

    LinearControl out;
    Eigen::MatrixXd sigma(k, k);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) sigma(r, c) = sig(static_cast<long>(r) - static_cast<long>(c));
    out.sigma_inv = spd_inverse(sigma);

    const long N = static_cast<long>(n);
    std::vector<double> rho(n + 1);
    for (long j = static_cast<long>(K); j <= N - 1; ++j) rho[static_cast<std::size_t>(N - j)] = rho_e(N - j);
    double total = 0.0;
    for (std::size_t r = 1; r <= k; ++r)
        for (std::size_t s = 1; s <= k; ++s) {
            const long R = static_cast<long>(r), S = static_cast<long>(s);
            double acc = 0.0;
            for (long j = static_cast<long>(K); j <= N - 1; ++j)
                acc += sig(N - S - j + R) * rho[static_cast<std::size_t>(N - j)] +
                       gamma_e(j + S - N) * gamma_e(N - j + R) + gamma_e(S) * gamma_e(R);
            total += out.sigma_inv(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(s - 1)) * acc;
        }
    out.mean = -total / static_cast<double>(n - K + 1);
    return out;
}

}  // namespace

ExperimentReport mse_experiment(const ExperimentConfig& config) {
    auto report = start_report("mse", config);
    const auto& spec = config.spec;
    const double var_eps = spec.sigma_eps * spec.sigma_eps;
    std::vector<double> max_dev;

    for (std::size_t cell = 0; cell < config.n_grid.size(); ++cell) {
        const std::size_t n = config.n_grid[cell];
        const std::size_t K = config.kn_rule.resolve(spec, n);
        require(K >= 1 && K <= n - 1, ErrorKind::Contract, "mse: K_n out of range for n = " + std::to_string(n));
        std::vector<std::size_t> ks;
        if (config.k_grid.empty())
            for (std::size_t k = 1; k <= K; ++k) ks.push_back(k);
        else
            for (std::size_t k : config.k_grid)
                if (k <= K) ks.push_back(k);
        require(!ks.empty(), ErrorKind::Contract, "mse: no order k <= K_n");
        const std::size_t kmax = ks.back();

        const auto schedule = validate_schedule(spec, n, K, Theorem::T2, config.kn_rule.schedule);
        if (!schedule.all_passed())
            report.warnings.push_back("n=" + std::to_string(n) + ", K_n=" + std::to_string(K) +
                                      ": schedule violates the T2 surrogate");

        // Whole-past projection X_tilde_{n+1}(n) and the order-k projections.
        const auto acvf = autocovariance(spec, n + kmax + 1);
        const auto full = levinson_solve(std::span<const double>(acvf.data(), n + 1));
        std::vector<std::vector<double>> theo(ks.size());
        std::vector<LinearControl> controls;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            theo[i] = levinson_solve(std::span<const double>(acvf.data(), ks[i] + 1)).a;
            controls.push_back(linear_control(acvf, theo[i], n, K));
        }
        const double v_n = *full.v;

        const Sampler sampler(spec, n + 1);
        struct Row {
            std::vector<double> sq_err, cv, cv2;
        };
        auto rows = map_replicates<std::optional<Row>>(
            config.replicates,
            [&](std::size_t r) -> std::optional<Row> {
                std::vector<double> path(n + 1);
                sampler.sample_into(replicate_seed(config.master_seed, cell, r), path);
                const std::span<const double> x(path.data(), n);
                const double next = path[n];
                const double whole = dot_reversed(full.a, x, n);
                Row row;
                try {
                    const auto moments = estimation_moments(x, kmax, K);
                    for (std::size_t i = 0; i < ks.size(); ++i) {
                        const auto est = solve_estimated(moments, ks[i]);
                        const double x_hat = dot_reversed(est.a, x, ks[i]);
                        const double x_tilde = dot_reversed(theo[i], x, ks[i]);
                        const double f = x_tilde - x_hat, s = whole - x_tilde;
                        const std::size_t k = ks[i];
                        Eigen::VectorXd xk(k), u(k);
                        for (std::size_t r = 0; r < k; ++r) {
                            xk(static_cast<Eigen::Index>(r)) = x[n - 1 - r];
                            double ur = moments.cross(static_cast<Eigen::Index>(r));
                            for (std::size_t c = 0; c < k; ++c)
                                ur += moments.cov.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                                      theo[i][c];
                            u(static_cast<Eigen::Index>(r)) = ur;
                        }
                        const double f_lin = -u.dot(controls[i].sigma_inv * xk);
                        const double g = f * f + 2.0 * f * s;
                        row.sq_err.push_back((next - x_hat) * (next - x_hat));
                        row.cv.push_back(g);
                        row.cv2.push_back(g - 2.0 * (f_lin * s - controls[i].mean));
                    }
                } catch (const Error& e) {
                    if (is_singular(e)) return std::nullopt;
                    throw;
                }
                return row;
            },
            config.threads);

        std::size_t kept = 0;
        for (const auto& r : rows) kept += r.has_value();
        report.attempted += config.replicates;
        report.excluded += config.replicates - kept;
        require(kept >= 2, ErrorKind::SingularMatrix, "mse: all replicates excluded");

        const auto es2 = projection_error_variances(spec, kmax);
        double worst = 0.0;
        std::size_t worst_k = ks.front();
        double worst_se = 0.0;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const std::size_t k = ks[i];
            const auto direct = mean_se(column(rows, [&](const Row& w) { return w.sq_err[i]; }));
            const auto cv1 = mean_se(column(rows, [&](const Row& w) { return w.cv[i]; }));
            const auto cv = mean_se(column(rows, [&](const Row& w) { return w.cv2[i]; }));
            const double excess = es2[k - 1];
            const double L = excess + static_cast<double>(k) * var_eps / static_cast<double>(n - K + 1);
            const double ratio_cv = (excess + cv.mean) / L;
            report.cells.push_back({"E_S2", n, k, K, excess, 0.0});
            report.cells.push_back({"L_n", n, k, K, L, 0.0});
            report.cells.push_back({"mse_direct", n, k, K, direct.mean, direct.se});
            report.cells.push_back({"mse_cv", n, k, K, var_eps + excess + cv.mean, cv.se});
            report.cells.push_back({"ratio_direct", n, k, K, (direct.mean - var_eps) / L, direct.se / L});
            {
                const auto hm = mean_se(column(rows, [&](const Row& w) { return w.cv[i] - w.cv2[i]; }));
                report.cells.push_back({"control_shift", n, k, K, hm.mean, hm.se});
            }
            report.cells.push_back({"ratio_cv1", n, k, K, (excess + cv1.mean) / L, cv1.se / L});
            report.cells.push_back({"ratio_cv", n, k, K, ratio_cv, cv.se / L});
            if (std::abs(ratio_cv - 1.0) >= worst) {
                worst = std::abs(ratio_cv - 1.0);
                worst_k = k;
                worst_se = cv.se / L;
            }
            if (spec.d == 0.0) {
                const double dev = std::abs(ratio_cv - 1.0);
                report.verdicts.push_back({"control_ratio_n" + std::to_string(n) + "_k" + std::to_string(k),
                                           dev <= 3.0 * cv.se / L, dev, 3.0 * cv.se / L,
                                           "white-noise ratio within 3 Monte Carlo SE of 1"});
            }
        }
        report.cells.push_back({"max_deviation", n, 0, K, worst, worst_se});
        report.cells.push_back({"max_deviation_order", n, 0, K, static_cast<double>(worst_k), 0.0});
        report.cells.push_back({"v_n_minus_sigma2", n, 0, K, v_n - var_eps, 0.0});
        max_dev.push_back(worst);
    }

    add_exclusion_verdict(report);
    if (spec.d > 0.0) {
        bool decreasing = true;
        for (std::size_t i = 1; i < max_dev.size(); ++i) decreasing = decreasing && max_dev[i] < max_dev[i - 1];
        report.verdicts.push_back({"max_deviation_decreasing", decreasing, max_dev.back(), 0.0,
                                   "max_k |ratio - 1| strictly decreasing along the n-grid"});
        report.verdicts.push_back({"max_deviation_final", max_dev.back() <= config.mse_final_tolerance,
                                   max_dev.back(), config.mse_final_tolerance,
                                   "max_k |ratio - 1| at the largest n"});
    }
    return report;
}

ExperimentReport clt_experiment(const ExperimentConfig& config) {
    require(config.spec.d > 0.0, ErrorKind::Contract,
            "clt: E[S^2] = 0 for d = 0, so the normalised statistic is undefined");
    auto report = start_report("clt", config);
    const auto& spec = config.spec;

    std::vector<double> last_stats;
    for (std::size_t cell = 0; cell < config.n_grid.size(); ++cell) {
        const std::size_t n = config.n_grid[cell];
        const std::size_t K = config.kn_rule.resolve(spec, n);
        require(K >= 1 && K <= n - 1, ErrorKind::Contract, "clt: K_n out of range");
        const auto schedule = validate_schedule(spec, n, K, Theorem::T3, config.kn_rule.schedule);
        if (!schedule.all_passed())
            report.warnings.push_back("n=" + std::to_string(n) + ", K_n=" + std::to_string(K) +
                                      ": schedule violates the T3 surrogate");
        const double es2 = projection_error_variance(spec, K);
        const double norm = config.normalization_scale * std::sqrt(es2);
        const std::size_t J = config.truncation_J ? std::min(n, config.truncation_J) : n;
        const auto ar = ar_coefficients(spec, J);
        const Sampler sampler(spec, n);

        struct Row {
            double stat, tail;
        };
        auto rows = map_replicates<std::optional<Row>>(
            config.replicates,
            [&](std::size_t r) -> std::optional<Row> {
                std::vector<double> x(n);
                sampler.sample_into(replicate_seed(config.master_seed, cell, r), x);
                try {
                    const auto est = estimated_coefficients(x, K, K);
                    const double x_hat = dot_reversed(est.a, x, K);
                    const auto wk = predict_wiener_kolmogorov(ar, x, J);
                    return Row{(wk.value - x_hat) / norm, wk.tail_bound};
                } catch (const Error& e) {
                    if (is_singular(e)) return std::nullopt;
                    throw;
                }
            },
            config.threads);

        const auto stats = column(rows, [](const Row& w) { return w.stat; });
        report.attempted += config.replicates;
        report.excluded += config.replicates - stats.size();
        require(stats.size() >= 50, ErrorKind::SingularMatrix, "clt: too many excluded replicates");
        const auto mom = sample_moments(stats);
        const auto ks = ks_test(stats);
        const auto tail = mean_se(column(rows, [](const Row& w) { return w.tail; }));
        const double m = static_cast<double>(stats.size());
        report.cells.push_back({"E_S2", n, K, K, es2, 0.0});
        report.cells.push_back({"mean", n, K, K, mom.mean, std::sqrt(mom.variance / m)});
        report.cells.push_back({"variance", n, K, K, mom.variance, mom.variance * std::sqrt(2.0 / (m - 1.0))});
        report.cells.push_back({"skewness", n, K, K, mom.skewness, std::sqrt(6.0 / m)});
        report.cells.push_back({"excess_kurtosis", n, K, K, mom.excess_kurtosis, std::sqrt(24.0 / m)});
        report.cells.push_back({"ks_distance", n, K, K, ks.distance, 0.0});
        report.cells.push_back({"ks_p_value", n, K, K, ks.p_value, 0.0});
        report.cells.push_back({"wk_terms", n, K, K, static_cast<double>(J), 0.0});
        report.cells.push_back({"wk_tail_bound", n, K, K, tail.mean, tail.se});
        if (cell + 1 == config.n_grid.size()) {
            last_stats = stats;
            report.verdicts.push_back({"ks_p_value", ks.p_value > config.ks_p_threshold, ks.p_value,
                                       config.ks_p_threshold, "KS against N(0,1) at the largest n"});
            const double dv = std::abs(mom.variance - 1.0);
            report.verdicts.push_back({"variance", dv <= config.clt_variance_tolerance, dv,
                                       config.clt_variance_tolerance, "|sample variance - 1|"});
            const double mean_tol = 1.1 * 3.0 / std::sqrt(static_cast<double>(config.replicates));
            report.verdicts.push_back({"mean", std::abs(mom.mean) <= mean_tol, std::abs(mom.mean), mean_tol,
                                       "|sample mean| <= 1.1 * 3 / sqrt(replicates)"});
        }
    }

    std::sort(last_stats.begin(), last_stats.end());
    for (int i = 1; i <= 99; ++i) {
        const double p = i / 100.0;
        report.qq.push_back({p, normal_quantile(p), quantile_sorted(last_stats, p)});
    }
    add_exclusion_verdict(report);
    return report;
}

namespace {

// Runs `per_prefix(sigma_hat, n_index)` for every grid prefix of one path per
// replicate; returns replicate-major rows (nullopt = excluded).
template <class Fn>
std::vector<std::optional<std::vector<double>>> prefix_rows(const ExperimentConfig& config, std::size_t k,
                                                            Fn&& per_prefix) {
    const std::size_t n_max = config.n_grid.back();
    const Sampler sampler(config.spec, n_max);
    return map_replicates<std::optional<std::vector<double>>>(
        config.replicates,
        [&](std::size_t r) -> std::optional<std::vector<double>> {
            std::vector<double> x(n_max);
            sampler.sample_into(replicate_seed(config.master_seed, 0, r), x);
            std::vector<double> out;
            try {
                for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
                    const auto cov = empirical_cov(std::span<const double>(x).first(config.n_grid[i]), k, k);
                    per_prefix(cov.matrix, out);
                }
            } catch (const Error& e) {
                if (is_singular(e)) return std::nullopt;
                throw;
            }
            return out;
        },
        config.threads);
}

FitReport log_fit(const std::string& name, const std::vector<double>& ns, const std::vector<MeanSe>& stats,
                  double expected, bool weighted, bool log_corrected, std::size_t K) {
    std::vector<double> lx, ly, w;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        lx.push_back(std::log(ns[i]));
        double y = std::log(stats[i].mean);
        if (log_corrected) y -= 0.5 * std::log(std::log(ns[i] - static_cast<double>(K) + 1.0));
        ly.push_back(y);
        const double rel = stats[i].se / stats[i].mean;
        w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
    }
    const auto f = fit_line(lx, ly, weighted ? std::span<const double>(w) : std::span<const double>());
    FitReport out;
    out.name = name;
    out.model = log_corrected ? "power*sqrt(log)" : "power";
    out.slope = f.slope;
    out.slope_se = f.slope_se;
    out.intercept = f.intercept;
    out.rss = f.rss;
    out.points = f.points;
    const double pts = static_cast<double>(f.points);
    out.aic = pts * std::log(std::max(f.rss, 1e-300) / pts) + 2.0 * 2.0;
    out.expected_slope = expected;
    return out;
}

}  // namespace

ExperimentReport covariance_rate_experiment(const ExperimentConfig& config) {
    auto report = start_report("covrate", config);
    const auto& spec = config.spec;
    const std::size_t k = config.k;
    require(k >= 1 && k <= config.n_grid.front(), ErrorKind::Contract, "covrate: need 1 <= k <= min n");
    require(static_cast<double>(config.n_grid.back()) >= 100.0 * static_cast<double>(config.n_grid.front()),
            ErrorKind::Contract, "covrate: n_grid must span at least two decades");

    RateRegime regime;
    if (spec.d > 0.0) regime = rate_regime(spec);  // d = 0 control: plain n^{-1/2}
    if (!regime.warning.empty()) report.warnings.push_back(regime.warning);

    const Eigen::MatrixXd sigma = theoretical_cov(spec, k).dense();
    const Eigen::MatrixXd sigma_inv = spd_inverse(sigma);
    auto rows = prefix_rows(config, k, [&](const Eigen::MatrixXd& hat, std::vector<double>& out) {
        out.push_back(spectral_norm(hat - sigma));
        Eigen::MatrixXd diff = spd_inverse(hat) - sigma_inv;
        diff = 0.5 * (diff + diff.transpose());
        out.push_back(spectral_norm(diff));
    });

    std::size_t kept = 0;
    for (const auto& r : rows) kept += r.has_value();
    report.attempted = config.replicates;
    report.excluded = config.replicates - kept;
    require(kept >= 2, ErrorKind::SingularMatrix, "covrate: all replicates excluded");

    std::vector<double> ns;
    std::vector<MeanSe> cov_stats, inv_stats;
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        const std::size_t n = config.n_grid[i];
        ns.push_back(static_cast<double>(n));
        cov_stats.push_back(mean_se(column(rows, [&](const std::vector<double>& v) { return v[2 * i]; })));
        inv_stats.push_back(mean_se(column(rows, [&](const std::vector<double>& v) { return v[2 * i + 1]; })));
        report.cells.push_back({"cov_err_norm", n, k, k, cov_stats.back().mean, cov_stats.back().se});
        report.cells.push_back({"inv_err_norm", n, k, k, inv_stats.back().mean, inv_stats.back().se});
        report.cells.push_back({"rate_function_sqrt", n, k, k, std::sqrt(rate_function(spec.d, n, k)), 0.0});
    }

    const double expected = regime.predicted_log_slope;
    const auto cov_fit = log_fit("cov_rate", ns, cov_stats, expected, config.weighted_fit, false, k);
    const auto inv_fit = log_fit("inv_rate", ns, inv_stats, expected, config.weighted_fit, false, k);
    report.fits.push_back(cov_fit);
    report.fits.push_back(inv_fit);

    if (regime.regime == Regime::Critical) {
        const auto corrected = log_fit("cov_rate_log_corrected", ns, cov_stats, expected, config.weighted_fit, true, k);
        report.fits.push_back(corrected);
        report.verdicts.push_back({"log_corrected_fits_better", corrected.aic < cov_fit.aic,
                                   corrected.aic - cov_fit.aic, 0.0,
                                   "AIC(power * sqrt(log n)) - AIC(power); negative favours the log correction"});
    } else {
        const double dev = std::abs(cov_fit.slope - expected);
        report.verdicts.push_back({"cov_rate_slope", dev <= config.slope_tolerance, cov_fit.slope,
                                   config.slope_tolerance,
                                   "fitted slope of log E||Sigma_hat - Sigma|| vs expected " + std::to_string(expected)});
        const double dev_inv = std::abs(inv_fit.slope - expected);
        report.verdicts.push_back({"inv_rate_slope", dev_inv <= config.slope_tolerance, inv_fit.slope,
                                   config.slope_tolerance,
                                   "fitted slope of log E||Sigma_hat^-1 - Sigma^-1|| vs expected " +
                                       std::to_string(expected)});
    }
    add_exclusion_verdict(report);
    return report;
}

ExperimentReport moment_bound_experiment(const ExperimentConfig& config) {
    auto report = start_report("momentbound", config);
    const auto& spec = config.spec;
    const std::size_t k = config.k;
    require(k >= 1, ErrorKind::Contract, "momentbound: k must be >= 1");
    for (std::size_t n : config.n_grid)
        require(k * k < n, ErrorKind::Contract,
                "momentbound: K_n = " + std::to_string(k) + " violates K_n = o(sqrt(n)) at n = " + std::to_string(n));
    for (double q : config.q_orders)
        require(q > 0.0 && q <= 4.0, ErrorKind::Contract, "momentbound: moment orders must lie in (0, 4]");

    const Eigen::MatrixXd sigma = theoretical_cov(spec, k).dense();
    const double ref_norm = spectral_norm(spd_inverse(sigma));
    const std::size_t nq = config.q_orders.size();

    auto rows = prefix_rows(config, k, [&](const Eigen::MatrixXd& hat, std::vector<double>& out) {
        const auto [lmin, lmax] = extreme_eigs(hat);
        (void)lmax;
        require(lmin > 0.0, ErrorKind::SingularMatrix, "Sigma_hat singular");
        Eigen::MatrixXd inv = spd_inverse(hat);
        inv = 0.5 * (inv + inv.transpose());
        const double inv_norm = spectral_norm(inv);
        for (double q : config.q_orders) {
            out.push_back(std::pow(lmin, -q));
            out.push_back(std::pow(inv_norm, q));
        }
    });

    std::size_t kept = 0;
    for (const auto& r : rows) kept += r.has_value();
    report.attempted = config.replicates;
    report.excluded = config.replicates - kept;
    require(kept >= 2, ErrorKind::SingularMatrix, "momentbound: all replicates excluded");

    for (std::size_t qi = 0; qi < nq; ++qi) {
        const double q = config.q_orders[qi];
        char qtag[32];
        std::snprintf(qtag, sizeof qtag, "q%g", q);
        std::vector<MeanSe> inv_moments;
        for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
            const std::size_t n = config.n_grid[i];
            const std::size_t base = i * 2 * nq + 2 * qi;
            const auto lam = mean_se(column(rows, [&](const std::vector<double>& v) { return v[base]; }));
            const auto inv = mean_se(column(rows, [&](const std::vector<double>& v) { return v[base + 1]; }));
            report.cells.push_back({std::string("lambda_min_inv_moment_") + qtag, n, k, k, lam.mean, lam.se});
            report.cells.push_back({std::string("inv_norm_moment_") + qtag, n, k, k, inv.mean, inv.se});
            inv_moments.push_back(inv);
        }
        const double target = std::pow(ref_norm, q);
        report.cells.push_back({std::string("theoretical_inv_norm_") + qtag, 0, k, k, target, 0.0});

        bool non_increasing = true;
        for (std::size_t i = 2; i < inv_moments.size(); ++i) {
            const double slack = 2.0 * std::max(inv_moments[i].se, inv_moments[i - 1].se);
            non_increasing = non_increasing && inv_moments[i].mean <= inv_moments[i - 1].mean + slack;
        }
        const double terminal = inv_moments.back().mean / target - 1.0;
        report.verdicts.push_back({std::string("non_increasing_") + qtag, non_increasing, inv_moments.back().mean,
                                   0.0, "E||Sigma_hat^-1||^q non-increasing from the second grid point within 2 SE"});
        report.verdicts.push_back({std::string("terminal_") + qtag,
                                   std::abs(terminal) <= config.bound_terminal_tolerance, terminal,
                                   config.bound_terminal_tolerance,
                                   "relative gap of the final E||Sigma_hat^-1||^q to ||Sigma^-1||^q"});
    }
    add_exclusion_verdict(report);
    return report;
}

}  // namespace lmpred
