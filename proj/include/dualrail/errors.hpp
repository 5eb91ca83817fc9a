#pragma once

#include <stdexcept>
#include <string>

namespace dualrail {

// Base for all input/contract violations. The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct KindMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct ProbabilityOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

struct BadWeights : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptySlice : ValidationError {
    using ValidationError::ValidationError;
};

struct NotAPlaneFragment : ValidationError {
    using ValidationError::ValidationError;
};

struct OrbitInvalid : ValidationError {
    using ValidationError::ValidationError;
};

struct DegenerateData : ValidationError {
    using ValidationError::ValidationError;
};

struct SingularMap : ValidationError {
    using ValidationError::ValidationError;
};

struct InfeasibleOrbit : ValidationError {
    using ValidationError::ValidationError;
};

// Numerical failures of an internal solver. The CLI maps these to exit code 3.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : SolverFailure {
    using SolverFailure::SolverFailure;
};

}  // namespace dualrail
