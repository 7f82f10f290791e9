#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace fluidalg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arrays with inconsistent shapes (dimension mismatch, wrong matrix size).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Non-finite or otherwise unusable numeric input.
class DataError : public Error {
public:
    using Error::Error;
};

/// An algebra (or Lie input) failed one of its defining invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A computation produced NaN/Inf. Carries the simulation time when known.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, std::optional<double> t = std::nullopt)
        : Error(what), time_(t) {}

    std::optional<double> time() const { return time_; }

private:
    std::optional<double> time_;
};

/// Newton projection onto the invariant manifold did not converge.
class ProjectionFailure : public Error {
public:
    using Error::Error;
};

/// Requested instance is larger than the configured cap.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Seeded generator exhausted its retry budget.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fluidalg
