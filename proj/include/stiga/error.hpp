#pragma once

#include <stdexcept>
#include <string>

namespace stiga {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function (e.g. t outside [0,1]).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid argument or incompatible dimensions.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown: singular Jacobian, rank-deficient Gram matrix, ...
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Failure while integrating element contributions.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// The Krylov iteration did not reach the requested tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_residual, int iterations)
        : Error(what), best_residual_(best_residual), iterations_(iterations) {}

    [[nodiscard]] double best_residual() const noexcept { return best_residual_; }
    [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
    double best_residual_;
    int iterations_;
};

/// A dense oracle was asked to work on a problem larger than its guard.
class GuardError : public Error {
public:
    using Error::Error;
};

/// Malformed study configuration; the message names the offending key.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error("config key '" + key + "': " + what), key_(key) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace stiga
