#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lmpred/model.hpp"

namespace lmpred {

enum class SampleMethod { CirculantEmbedding, Cholesky };

const char* to_string(SampleMethod m) noexcept;

/// A realisation X_1..X_n with the provenance needed to regenerate it.
struct SamplePath {
    std::vector<double> values;
    ProcessSpec spec;
    std::uint64_t seed = 0;
    SampleMethod method = SampleMethod::CirculantEmbedding;

    std::size_t size() const { return values.size(); }
};

/// Exact sampler for N(0, Sigma(n)) of one (spec, n). Construction does the
/// expensive part (autocovariance, embedding spectrum or Cholesky factor);
/// sample() is then const and safe to call from many threads.
class Sampler {
public:
    Sampler(const ProcessSpec& spec, std::size_t n, SampleMethod preferred = SampleMethod::CirculantEmbedding);
    ~Sampler();
    Sampler(Sampler&&) noexcept;
    Sampler& operator=(Sampler&&) noexcept;

    SamplePath sample(std::uint64_t seed) const;
    /// Writes X_1..X_n into out (out.size() == n).
    void sample_into(std::uint64_t seed, std::span<double> out) const;

    const ProcessSpec& spec() const { return spec_; }
    std::size_t n() const { return n_; }
    /// Method actually in use (circulant may have fallen back to Cholesky).
    SampleMethod method() const { return method_; }
    /// Circulant size; 0 when sampling by Cholesky.
    std::size_t embedding_size() const { return m_; }
    /// Embedding eigenvalues in [-1e-9 max, 0) that were clamped to zero.
    std::size_t clamped_eigenvalues() const { return clamped_; }
    /// Whether the Cholesky factor needed a diagonal ridge.
    bool ridge_applied() const { return ridge_applied_; }

private:
    struct Fft;
    ProcessSpec spec_;
    std::size_t n_ = 0;
    SampleMethod method_ = SampleMethod::CirculantEmbedding;
    std::size_t m_ = 0;
    std::size_t clamped_ = 0;
    bool ridge_applied_ = false;
    std::vector<double> scale_;        // sqrt(lambda_j / m) (or / 2m), j = 0..m/2
    std::vector<double> cholesky_;     // row-major lower factor, n x n
    std::unique_ptr<Fft> fft_;
};

SamplePath sample(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                  SampleMethod method = SampleMethod::CirculantEmbedding);

/// Replicate r uses split_seed(master_seed, r). Output is identical for any
/// worker count; errors are rethrown tagged with the replicate index.
std::vector<SamplePath> sample_batch(const ProcessSpec& spec, std::size_t n, std::size_t replicates,
                                     std::uint64_t master_seed, int threads = 0,
                                     SampleMethod method = SampleMethod::CirculantEmbedding);
std::vector<SamplePath> sample_batch_serial(const ProcessSpec& spec, std::size_t n, std::size_t replicates,
                                            std::uint64_t master_seed,
                                            SampleMethod method = SampleMethod::CirculantEmbedding);

/// Path generated by MA(inf) filtering of stored white noise, so the
/// innovations are visible. history[0..burn_in) are the pre-sample values
/// X_{1-B}..X_0 and history[burn_in + t - 1] is X_t. Every X_t is the filter
/// applied to all stored innovations, which makes the AR inversion over the
/// full stored history exact; stationarity is only approximate, with the
/// neglected variance recorded in stationarity_tail.
struct InnovationPath {
    std::vector<double> history;
    std::vector<double> innovations;  // aligned with history
    std::size_t burn_in = 0;
    double stationarity_tail = 0.0;  // sigma_eps^2 * sum_{j > burn_in} b_j^2 (bound)
    std::uint64_t seed = 0;

    std::span<const double> sample() const { return std::span(history).subspan(burn_in); }
};

InnovationPath sample_with_innovations(const ProcessSpec& spec, std::size_t n, std::size_t burn_in,
                                       std::uint64_t seed);

}  // namespace lmpred
