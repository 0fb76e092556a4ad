#pragma once

#include <stdexcept>
#include <string>

namespace lmpred {

/// Broad failure categories; the CLI maps them to exit codes.
enum class ErrorKind {
    Contract,          // precondition / index contract violated
    Domain,            // argument outside the mathematical domain
    ParameterRange,    // model parameter outside the supported range
    IllConditioned,    // model polynomial too close to the unit circle
    SingularMatrix,    // Cholesky / Levinson breakdown
    SimulationInfeasible,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace lmpred
