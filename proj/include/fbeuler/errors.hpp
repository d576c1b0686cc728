#pragma once

#include <stdexcept>
#include <string>

namespace fbeuler {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mesh validation
struct NonManifold : Error { using Error::Error; };
struct InvertedOrientation : Error { using Error::Error; };
struct DegenerateFace : Error { using Error::Error; };
struct InsufficientNeighborhood : Error { using Error::Error; };

// Potential theory
struct IllConditioned : Error { using Error::Error; };
struct PointTooClose : Error { using Error::Error; };
struct CoincidentPoints : Error { using Error::Error; };
struct OutsideBall : Error { using Error::Error; };

// Volumetric solvers
struct SolverDiverged : Error { using Error::Error; };
struct ResolutionTooCoarse : Error { using Error::Error; };

// Diagnostics / evolution
struct TaylorDegenerate : Error { using Error::Error; };
struct UnsortedRecords : Error { using Error::Error; };
struct CFLViolation : Error { using Error::Error; };
struct MeshQualityFailure : Error { using Error::Error; };

// Configuration / IO
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace fbeuler
