#pragma once

#include <stdexcept>
#include <string>

namespace sppost {

enum class ErrorKind {
    DimensionMismatch,
    NonFiniteInput,
    SingularSystem,
    NoConvergence,
    DegenerateDiagonal,
    InsufficientData,
    InvalidArgument,
    ParseError,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace sppost
