#pragma once

#include <stdexcept>
#include <string>

namespace qmaxent {

/// Inputs that violate a documented precondition (bad sites, sizes, ranges).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Site/layout mismatches: unknown sites, duplicate sites, incompatible layouts.
struct LayoutError : DomainError {
    using DomainError::DomainError;
};

/// Requested Hilbert space exceeds the configured dimension cap.
struct SizeError : DomainError {
    using DomainError::DomainError;
};

/// Operation only implemented for qubit (local dimension 2) systems.
struct UnsupportedDimensionError : DomainError {
    using DomainError::DomainError;
};

/// A state invariant failed at runtime (non-Hermitian data, bad trace, ...).
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown inside an iterative routine; message carries diagnostics.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qmaxent
