#pragma once

#include <stdexcept>
#include <string>

namespace lcns {

enum class ErrorKind {
    InvalidArgument,
    GridMismatch,
    PositivityViolation,
    MassResidual,
    CflViolation,
    LinearSolveDiverged,
    NonFiniteState,
    Misaligned,
    OutsideBall,
    StagnationWithoutConvergence,
    InfeasiblePenalty,
    DegenerateMultiplier,
    ParameterViolation,
    UnknownKey,
    TypeMismatch,
    MissingFile,
    ParseError,
    IoError,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library; `kind()` is the stable, testable part.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace lcns
