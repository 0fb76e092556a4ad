#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace lmpred {

enum class CoeffSourceKind { Theoretical, Estimated };

struct CoeffSource {
    CoeffSourceKind kind = CoeffSourceKind::Theoretical;
    std::size_t n = 0;    // estimated only
    std::size_t K_n = 0;  // estimated only
    std::optional<std::uint64_t> seed;
};

/// Order-k prediction coefficients a_{1,k}..a_{k,k}. The predictor weight on
/// X_{n+1-j} is -a[j-1].
struct PredictorCoeffs {
    std::size_t order = 0;
    std::vector<double> a;
    std::optional<double> v;                  // order-k innovation variance (theoretical)
    std::vector<double> innovation_variances;  // v_1..v_k (theoretical)
    std::vector<double> reflection;            // partial autocorrelations rho_1..rho_k (theoretical)
    CoeffSource source;
};

}  // namespace lmpred
