#include "lmpred/simulate.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <mutex>
#include <string>

#include "fftw_lock.hpp"
#include "lmpred/error.hpp"
#include "lmpred/parallel.hpp"
#include "lmpred/rng.hpp"

namespace lmpred {

namespace {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)));
    if (!p) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

constexpr double kNegativeEigenTolerance = 1e-9;

// Eigenvalues of the symmetric circulant with first row built from acvf:
// lambda_k = c_0 + (-1)^k c_{m/2} + 2 sum_{j=1}^{m/2-1} c_j cos(pi j k / (m/2)),
// which is exactly FFTW's unnormalised DCT-I of length m/2 + 1.
std::vector<double> circulant_eigenvalues(std::span<const double> acvf, std::size_t m) {
    const std::size_t half = m / 2;
    auto in = fftw_buffer<double>(half + 1);
    auto out = fftw_buffer<double>(half + 1);
    std::copy_n(acvf.begin(), half + 1, in.get());
    std::vector<double> lambda(half + 1);
    if (half == 0) {
        lambda[0] = acvf[0];
        return lambda;
    }
    if (half == 1) {  // DCT-I needs length >= 2; handle m = 2 directly
        lambda[0] = acvf[0] + acvf[1];
        lambda[1] = acvf[0] - acvf[1];
        return lambda;
    }
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_r2r_1d(static_cast<int>(half + 1), in.get(), out.get(), FFTW_REDFT00, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    std::copy_n(out.get(), half + 1, lambda.begin());
    return lambda;
}

}  // namespace

const char* to_string(SampleMethod m) noexcept {
    return m == SampleMethod::Cholesky ? "cholesky" : "circulant";
}

struct Sampler::Fft {
    fftw_plan plan = nullptr;
    std::size_t m = 0;

    explicit Fft(std::size_t size) : m(size) {
        auto in = fftw_buffer<fftw_complex>(m / 2 + 1);
        auto out = fftw_buffer<double>(m);
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(m), in.get(), out.get(), FFTW_ESTIMATE);
        if (!plan) fail(ErrorKind::SimulationInfeasible, "FFTW planning failed");
    }
    ~Fft() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
};

Sampler::~Sampler() = default;
Sampler::Sampler(Sampler&&) noexcept = default;
Sampler& Sampler::operator=(Sampler&&) noexcept = default;

Sampler::Sampler(const ProcessSpec& spec, std::size_t n, SampleMethod preferred) : spec_(spec), n_(n) {
    check_spec(spec);
    require(n >= 1, ErrorKind::Contract, "sample: n must be >= 1");

    if (preferred == SampleMethod::CirculantEmbedding) {
        // Smallest power of two >= 2(n-1), doubled until the embedding is
        // nonnegative definite.
        std::size_t m = std::bit_ceil(std::max<std::size_t>(2, 2 * (n - 1)));
        const std::size_t cap = n * (std::size_t{1} << 16);
        std::vector<double> acvf;
        for (; m <= cap; m *= 2) {
            acvf = autocovariance(spec, m / 2);
            auto lambda = circulant_eigenvalues(acvf, m);
            const double top = *std::max_element(lambda.begin(), lambda.end());
            const double floor = -kNegativeEigenTolerance * top;
            if (std::any_of(lambda.begin(), lambda.end(), [&](double l) { return l < floor; })) continue;
            std::size_t clamped = 0;
            for (double& l : lambda)
                if (l < 0.0) l = 0.0, ++clamped;
            if (clamped > 0)
                std::clog << "lmpred: warning: clamped " << clamped
                          << " slightly negative circulant eigenvalues to zero (m = " << m << ")\n";
            const double md = static_cast<double>(m);
            const std::size_t half = m / 2;
            scale_.resize(half + 1);
            for (std::size_t j = 0; j <= half; ++j) {
                const bool real_bin = (j == 0 || j == half);
                scale_[j] = std::sqrt(lambda[j] / (real_bin ? md : 2.0 * md));
            }
            m_ = m;
            clamped_ = clamped;
            method_ = SampleMethod::CirculantEmbedding;
            fft_ = std::make_unique<Fft>(m);
            return;
        }
    }

    // Dense Cholesky of Sigma(n).
    const auto acvf = autocovariance(spec, n - 1);
    Eigen::MatrixXd sigma(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sigma(i, j) = acvf[i > j ? i - j : j - i];
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        const double ridge = 1e-12 * sigma.trace() / static_cast<double>(n);
        sigma.diagonal().array() += ridge;
        llt.compute(sigma);
        require(llt.info() == Eigen::Success, ErrorKind::SimulationInfeasible,
                "covariance matrix not positive definite even after ridge");
        ridge_applied_ = true;
    }
    Eigen::MatrixXd lower = llt.matrixL();
    cholesky_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cholesky_[i * n + j] = lower(i, j);
    method_ = SampleMethod::Cholesky;
    m_ = 0;
}

void Sampler::sample_into(std::uint64_t seed, std::span<double> out) const {
    require(out.size() == n_, ErrorKind::Contract, "sample_into: output size mismatch");
    SplitMix64 rng(seed);
    if (method_ == SampleMethod::Cholesky) {
        std::vector<double> z(n_);
        for (double& v : z) v = rng.normal();
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            const double* row = cholesky_.data() + i * n_;
            for (std::size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
            out[i] = acc;
        }
        return;
    }
    const std::size_t half = m_ / 2;
    auto in = fftw_buffer<fftw_complex>(half + 1);
    auto x = fftw_buffer<double>(m_);
    in[0][0] = scale_[0] * rng.normal();
    in[0][1] = 0.0;
    for (std::size_t j = 1; j < half; ++j) {
        in[j][0] = scale_[j] * rng.normal();
        in[j][1] = scale_[j] * rng.normal();
    }
    in[half][0] = scale_[half] * rng.normal();
    in[half][1] = 0.0;
    fftw_execute_dft_c2r(fft_->plan, in.get(), x.get());
    std::copy_n(x.get(), n_, out.begin());
}

SamplePath Sampler::sample(std::uint64_t seed) const {
    SamplePath p;
    p.values.resize(n_);
    sample_into(seed, p.values);
    p.spec = spec_;
    p.seed = seed;
    p.method = method_;
    return p;
}

SamplePath sample(const ProcessSpec& spec, std::size_t n, std::uint64_t seed, SampleMethod method) {
    return Sampler(spec, n, method).sample(seed);
}

namespace {

template <class Map>
std::vector<SamplePath> batch_impl(const ProcessSpec& spec, std::size_t n, std::size_t replicates,
                                   std::uint64_t master_seed, SampleMethod method, Map&& map) {
    require(replicates >= 1, ErrorKind::Contract, "sample_batch: replicates must be >= 1");
    const Sampler sampler(spec, n, method);
    return map([&](std::size_t r) {
        try {
            return sampler.sample(split_seed(master_seed, r));
        } catch (const Error& e) {
            throw Error(e.kind(), "replicate " + std::to_string(r) + ": " + e.what());
        }
    });
}

}  // namespace

std::vector<SamplePath> sample_batch(const ProcessSpec& spec, std::size_t n, std::size_t replicates,
                                     std::uint64_t master_seed, int threads, SampleMethod method) {
    return batch_impl(spec, n, replicates, master_seed, method,
                      [&](auto&& body) { return map_replicates<SamplePath>(replicates, body, threads); });
}

std::vector<SamplePath> sample_batch_serial(const ProcessSpec& spec, std::size_t n, std::size_t replicates,
                                            std::uint64_t master_seed, SampleMethod method) {
    return batch_impl(spec, n, replicates, master_seed, method,
                      [&](auto&& body) { return map_replicates_serial<SamplePath>(replicates, body); });
}

InnovationPath sample_with_innovations(const ProcessSpec& spec, std::size_t n, std::size_t burn_in,
                                       std::uint64_t seed) {
    require(n >= 1, ErrorKind::Contract, "sample_with_innovations: n must be >= 1");
    const std::size_t total = burn_in + n;
    const auto b = ma_coefficients(spec, std::max<std::size_t>(total, 1));
    InnovationPath p;
    p.burn_in = burn_in;
    p.seed = seed;
    p.innovations.resize(total);
    SplitMix64 rng(seed);
    for (double& e : p.innovations) e = spec.sigma_eps * rng.normal();
    p.history.assign(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= t; ++j) acc += b.values[j] * p.innovations[t - j];
        p.history[t] = acc;
    }
    // Only the first history value has the shortest filter; the neglected
    // variance of X_1 is sigma^2 sum_{j >= burn_in + 1} b_j^2.
    const auto tail = ma_coefficients(spec, std::max<std::size_t>(burn_in, 1));
    p.stationarity_tail = spec.sigma_eps * spec.sigma_eps * tail.truncation_tail_bound;
    return p;
}

}  // namespace lmpred
