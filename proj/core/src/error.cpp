#include "lcns/error.hpp"

namespace lcns {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::PositivityViolation: return "PositivityViolation";
        case ErrorKind::MassResidual: return "MassResidual";
        case ErrorKind::CflViolation: return "CflViolation";
        case ErrorKind::LinearSolveDiverged: return "LinearSolveDiverged";
        case ErrorKind::NonFiniteState: return "NonFiniteState";
        case ErrorKind::Misaligned: return "Misaligned";
        case ErrorKind::OutsideBall: return "OutsideBall";
        case ErrorKind::StagnationWithoutConvergence: return "StagnationWithoutConvergence";
        case ErrorKind::InfeasiblePenalty: return "InfeasiblePenalty";
        case ErrorKind::DegenerateMultiplier: return "DegenerateMultiplier";
        case ErrorKind::ParameterViolation: return "ParameterViolation";
        case ErrorKind::UnknownKey: return "UnknownKey";
        case ErrorKind::TypeMismatch: return "TypeMismatch";
        case ErrorKind::MissingFile: return "MissingFile";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace lcns
