#pragma once

#include <stdexcept>
#include <string>

namespace bridgestop {

/// A quadrature or table produced a non-finite number. The message names
/// the offending node or matrix entry.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A covariance degenerated where it must not (R(t',t') <= 0, vanishing
/// variance, |a2'| below machine floor, ...).
struct DegeneracyError : std::runtime_error {
    explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

/// A covariance factorization violates the monotone-ratio criterion, so the
/// Gaussian process it describes is not Markov.
struct NotMarkovError : std::runtime_error {
    explicit NotMarkovError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration; the message carries the offending key path.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bridgestop
