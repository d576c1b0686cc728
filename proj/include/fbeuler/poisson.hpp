#pragma once

#include <functional>

#include "fbeuler/fields.hpp"
#include "fbeuler/potential_theory.hpp"

namespace fbeuler {

/// Second-order embedded-boundary 7-point Dirichlet solve of
/// laplacian(q) = source with q = g on the surface. Ghost values are imposed
/// by linear interpolation along grid lines using the signed-distance
/// fraction; the resulting SPD system is solved with Jacobi-preconditioned
/// CG to 1e-10 relative residual. boundary == nullptr means g = 0.
/// The returned field is valid on interior cells and extrapolated into the
/// outer band.
ScalarField3 poisson_dirichlet(const InteriorSampling& sampling,
                               const ScalarField3& source,
                               const std::function<double(const Vec3&)>& boundary = nullptr);

/// Convenience overload taking per-vertex boundary data.
ScalarField3 poisson_dirichlet(const InteriorSampling& sampling,
                               const ScalarField3& source,
                               const BoundaryScalar& boundary);

} // namespace fbeuler
