#pragma once

#include <stdexcept>
#include <string>

namespace oulab {

// Every failure the library reports derives from Error so callers (the CLI in
// particular) can map classes of failure to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

// Input outside the mathematical domain of an operation (t < 0, Re lambda >= 0, ...).
struct DomainError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

// Drift matrix is not stable, so no invariant measure exists.
struct StabilityError : Error {
    using Error::Error;
};

// Degenerate Gaussian where a nondegenerate one is required.
struct DegeneracyError : Error {
    using Error::Error;
};

// Iterative method failed (eigenvalues, step-size underflow, ...).
struct NumericError : Error {
    using Error::Error;
};

// Quadrature did not converge to the requested tolerance.
struct AccuracyError : Error {
    using Error::Error;
};

// Operation requested outside what the implementation covers (e.g. non-isotropic R).
struct ScopeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace oulab
