#include "lmpred/error.hpp"

namespace lmpred {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Contract: return "contract";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::ParameterRange: return "parameter-range";
        case ErrorKind::IllConditioned: return "ill-conditioned-model";
        case ErrorKind::SingularMatrix: return "singular-matrix";
        case ErrorKind::SimulationInfeasible: return "simulation-infeasible";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace lmpred
