#pragma once

#include <stdexcept>
#include <string>

namespace rcs {

// Thrown when an argument leaves the real-analytic domain of a transform
// (pole, negative discriminant in a closed form). Solver-internal negative
// discriminants are caught and turned into a status instead.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};

// 1-D root finding or iteration failed to meet its budget.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& m) : std::runtime_error(m) {}
};

// Custom penalty has no minimizer (unbounded below on the probed range).
struct NoMinimizerError : std::runtime_error {
    explicit NoMinimizerError(const std::string& m) : std::runtime_error(m) {}
};

// An integrand returned NaN/Inf at a quadrature node.
struct NonFiniteError : std::runtime_error {
    explicit NonFiniteError(const std::string& m) : std::runtime_error(m) {}
};

// Problem size outside a supported bound (e.g. exhaustive zero-norm search).
struct SizeError : std::runtime_error {
    explicit SizeError(const std::string& m) : std::runtime_error(m) {}
};

// Operation called on an object in the wrong state (e.g. distortion of a
// non-converged solution).
struct StateError : std::runtime_error {
    explicit StateError(const std::string& m) : std::runtime_error(m) {}
};

// Config file malformed or containing unknown keys.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Internal: the expression under a square root in the effective-parameter
// formulas went negative. Solvers catch this and report it as a status.
struct NegativeDiscriminantError : std::runtime_error {
    explicit NegativeDiscriminantError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace rcs
