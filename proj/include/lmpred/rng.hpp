#pragma once

#include <cstdint>

namespace lmpred {

/// SplitMix64 (Steele, Lea & Flood). State advances by the golden-ratio
/// increment 0x9E3779B97F4A7C15; output is mixed with the finalizer
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += kGolden;
        return mix(state_);
    }

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by inversion, so exactly one 64-bit draw per variate.
    double normal() noexcept;

    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Seed of replicate `index` under `master`: mix(master + (index + 1) * golden).
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return SplitMix64::mix(master + (index + 1) * SplitMix64::kGolden);
}

/// Standard normal quantile, relative error below ~1e-15 on (0, 1).
double normal_quantile(double p) noexcept;

/// Standard normal CDF via erfc.
double normal_cdf(double x) noexcept;

}  // namespace lmpred
