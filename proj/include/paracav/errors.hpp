#pragma once

#include <stdexcept>
#include <string>

namespace paracav {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// An iterative method failed to reach its tolerance.
struct NumericsError : Error {
    using Error::Error;
};

// geometry
struct RimHit : DomainError {
    using DomainError::DomainError;
};
struct NoHit : DomainError {
    using DomainError::DomainError;
};
struct OffSurface : DomainError {
    using DomainError::DomainError;
};

// classical dynamics
struct ZeroMomentum : DomainError {
    using DomainError::DomainError;
};
struct ForbiddenRegion : DomainError {
    using DomainError::DomainError;
};
struct NotPlanar : DomainError {
    using DomainError::DomainError;
};
struct AbortOnDrift : NumericsError {
    using NumericsError::NumericsError;
};

// actions
struct EmptyInterval : DomainError {
    using DomainError::DomainError;
};

// special functions
struct PoleInB : DomainError {
    using DomainError::DomainError;
};
struct DomainExceeded : DomainError {
    using DomainError::DomainError;
};
struct NonConvergence : NumericsError {
    using NumericsError::NumericsError;
};

// solvers / quadrature
struct NoSolution : NumericsError {
    using NumericsError::NumericsError;
};
struct ClosureFailure : NumericsError {
    using NumericsError::NumericsError;
};
struct QuadratureNotConverged : NumericsError {
    using NumericsError::NumericsError;
};

}  // namespace paracav
