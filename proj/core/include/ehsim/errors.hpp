// Error types raised by the ehsim core library.
#pragma once

#include <stdexcept>
#include <string>

namespace ehsim {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid numeric parameter passed to a constructor (negative variance, bad matrix, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Unreadable or malformed input data (trace files).
class InputError : public Error {
public:
    using Error::Error;
};

/// Statistical estimation impossible with the given horizon or data.
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Operation has no closed form for this source kind.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameter combination that cannot be realised (drift larger than the mean, ...).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Arrival rate at or above the channel capacity: lambda < C(mu) is violated.
class StabilityError : public ConfigurationError {
public:
    using ConfigurationError::ConfigurationError;
};

/// Requested large-deviations root does not exist.
class ExistenceError : public Error {
public:
    using Error::Error;
};

/// Regression with too few usable points.
class FitError : public Error {
public:
    using Error::Error;
};

/// Numeric range exceeded (exponent overflow).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Problem too large for the exact solver.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Chain splits into several closed classes reachable from the start state.
class DecompositionError : public Error {
public:
    using Error::Error;
};

/// Exact-chain preconditions violated (non-integer states, infinite support).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Configuration document failed to parse or validate.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ehsim
