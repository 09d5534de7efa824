#pragma once

#include <stdexcept>
#include <string>

namespace psgzt {

enum class ErrorCode {
    // domain errors
    InvalidArgument,
    InsufficientForcing,
    BranchUnavailable,
    InvalidInitialFunction,
    TooShort,
    HalfIntegerDelay,
    DegenerateOrbit,
    NoOrbit,
    NoTorusBranch,
    InvalidJ,
    SameClassAtBracket,
    NotOscillatory,
    // numerical failures
    AccumulationSuspected,
    ConvergenceFailure,
    InternalInconsistency,
};

const char* error_name(ErrorCode code);
bool is_domain_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace psgzt
