#pragma once

#include <stdexcept>
#include <string>

namespace toxcls {

// Base class for every failure the library reports. The CLI maps these to a
// single stderr line and a nonzero exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument values (out-of-range fractions, k > training size, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Malformed input data; the message carries the byte offset or row number.
class ParseError : public Error {
public:
    using Error::Error;
};

// A required column or field is missing from structured input.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Class balance cannot be established (e.g. no toxic documents).
class BalanceError : public Error {
public:
    using Error::Error;
};

// Operand shapes do not conform.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Invalid or inconsistent run configuration, detected before computation.
class ConfigError : public Error {
public:
    using Error::Error;
};

// An iterative routine ran out of its iteration budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual_(residual) {}
    explicit ConvergenceError(const std::string& msg) : Error(msg), residual_(0.0) {}

    double residual() const { return residual_; }

private:
    double residual_;
};

// Non-finite values or numerically impossible requests.
class NumericError : public Error {
public:
    using Error::Error;
};

// Filesystem-level failures.
class IoError : public Error {
public:
    using Error::Error;
};

// Structured file contents that do not match the expected format.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace toxcls
