#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dplab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters for a geometric construction (overlap, non-positive radius, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Complement of the rasterized inclusions is not a single connected component.
class ConnectivityError : public Error {
public:
    ConnectivityError(const std::string& what, int components)
        : Error(what), components_(components) {}
    int components() const noexcept { return components_; }

private:
    int components_;
};

/// A sampler could not produce an admissible realization; the caller may resample.
class ResampleSignal : public Error {
public:
    using Error::Error;
};

/// Iterative solver did not reach its tolerance.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Dense elimination hit a zero pivot.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// A computed identity or invariant failed its check.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Invalid or incomplete experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace dplab
