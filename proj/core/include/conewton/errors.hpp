#pragma once

#include <stdexcept>
#include <string>

namespace conewton {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape or rank defects in problem data (mismatched blocks, dependent rows).
struct StructuralError : Error {
    using Error::Error;
};

/// Input outside the mathematical domain of an operation (non-interior point,
/// eigenvalue outside a scalar function's domain).
struct DomainError : Error {
    using Error::Error;
};

/// Breakdown of a numerical procedure (failed factorization, negative radicand
/// beyond roundoff).
struct NumericalError : Error {
    using Error::Error;
};

/// Malformed input file; carries location context in the message.
struct ParseError : Error {
    using Error::Error;
};

/// Invalid configuration or flag value.
struct ParameterError : Error {
    using Error::Error;
};

/// Warning sink. Defaults to writing on stderr; tests may replace it.
using WarningHandler = void (*)(const std::string&);
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace conewton
