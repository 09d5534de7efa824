#include "psgzt/error.hpp"

namespace psgzt {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InsufficientForcing: return "InsufficientForcing";
        case ErrorCode::BranchUnavailable: return "BranchUnavailable";
        case ErrorCode::InvalidInitialFunction: return "InvalidInitialFunction";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::HalfIntegerDelay: return "HalfIntegerDelay";
        case ErrorCode::DegenerateOrbit: return "DegenerateOrbit";
        case ErrorCode::NoOrbit: return "NoOrbit";
        case ErrorCode::NoTorusBranch: return "NoTorusBranch";
        case ErrorCode::InvalidJ: return "InvalidJ";
        case ErrorCode::SameClassAtBracket: return "SameClassAtBracket";
        case ErrorCode::NotOscillatory: return "NotOscillatory";
        case ErrorCode::AccumulationSuspected: return "AccumulationSuspected";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    }
    return "Unknown";
}

bool is_domain_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::AccumulationSuspected:
        case ErrorCode::ConvergenceFailure:
        case ErrorCode::InternalInconsistency:
            return false;
        default:
            return true;
    }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace psgzt
