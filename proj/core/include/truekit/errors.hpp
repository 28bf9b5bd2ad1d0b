#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace truekit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message, std::size_t line = 0)
        : Error(line > 0 ? message + " at line " + std::to_string(line) : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Violated precondition or domain invariant (bad configuration, bad arguments).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Any failure reported by a text-generation backend.
class BackendError : public Error {
public:
    using Error::Error;
};

/// Transient transport-level failure (connection refused, timeout, 429/5xx).
/// The retry layer treats only this class as retryable.
class TransportError : public BackendError {
public:
    using BackendError::BackendError;
};

/// Credentials rejected by the provider. Never retried.
class AuthError : public BackendError {
public:
    using BackendError::BackendError;
};

}  // namespace truekit
