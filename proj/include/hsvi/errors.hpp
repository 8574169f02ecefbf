#pragma once

#include <stdexcept>
#include <string>

namespace hsvi {

// Base for every error raised by the library. The CLI maps the concrete
// type onto its exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or structurally malformed input.
class MalformedInputError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of an operation (T <= 0, p outside the
// moment interval, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Parameters violate a model constraint (Feller, kappa - rho*sigma > 0, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Raw SVI parameters that do not satisfy b = omega1*omega2/(2T).
class ConsistencyError : public Error {
public:
    ConsistencyError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A numerical routine could not reach the requested accuracy.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double estimate, double error_estimate)
        : Error(what), estimate_(estimate), error_estimate_(error_estimate) {}
    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double estimate_;
    double error_estimate_;
};

// Option price outside the no-arbitrage band.
class ArbitrageError : public Error {
public:
    using Error::Error;
};

// Option price exactly on the edge of the no-arbitrage band.
class BoundaryError : public Error {
public:
    using Error::Error;
};

// Not enough data to determine the requested fit.
class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

}  // namespace hsvi
