#pragma once

#include <stdexcept>
#include <string>

namespace rtpool {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
struct DegenerateSimplex : Error { using Error::Error; };
struct GeneralPositionViolation : Error { using Error::Error; };
struct JitterFailed : Error { using Error::Error; };

// tiling
struct TooFewPoints : Error { using Error::Error; };
struct TooManyPoints : Error { using Error::Error; };
struct OrderOutOfRange : Error { using Error::Error; };
struct UnknownVertex : Error { using Error::Error; };

// matrices / model
struct ShapeMismatch : Error { using Error::Error; };
struct NonFiniteActivation : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };

// LP oracle
struct LPNumericalFailure : Error { using Error::Error; };
struct IterationCapExceeded : LPNumericalFailure { using LPNumericalFailure::LPNumericalFailure; };

// pipeline
struct ParseError : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };
struct DisconnectedGraph : Error { using Error::Error; };
struct TooFewEigenvectors : Error { using Error::Error; };
struct UnknownArtifact : Error { using Error::Error; };

}  // namespace rtpool
