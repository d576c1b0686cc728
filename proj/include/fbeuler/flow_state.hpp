#pragma once

#include <memory>

#include "fbeuler/fields.hpp"
#include "fbeuler/poisson.hpp"
#include "fbeuler/potential_theory.hpp"

namespace fbeuler {

/// Snapshot of the evolving unknown: boundary surface, interior sampling,
/// velocity (grid + boundary trace) and vorticity.
struct FlowState {
    double t = 0.0;
    std::shared_ptr<const SurfaceMesh> mesh;
    std::shared_ptr<const InteriorSampling> sampling;
    VectorField3 u;
    std::vector<Vec3> U;  // boundary velocity per vertex
    VectorField3 omega;
};

/// sup of |div u| over interior cells with full difference stencils.
double divergence_sup(const FlowState& state);

/// Outward normal derivative of a grid scalar at every mesh vertex by
/// one-sided probes into the interior: (3 f0 - 4 f(x - hN) + f(x - 2hN)) / 2h
/// with f0 the prescribed boundary value.
std::vector<double> normal_derivative_at_vertices(const SurfaceMesh& mesh,
                                                  const ScalarField3& f,
                                                  double boundary_value = 0.0);

/// Pressure Poisson problem: laplacian p = -tr((grad u)^2), p = 0 on the
/// boundary.
ScalarField3 pressure_solve(const FlowState& state);

struct MaterialPressure {
    ScalarField3 dtp;                    // D_t p with zero boundary data
    std::vector<double> grad_n_dtp;      // normal derivative per vertex
    ScalarField3 source;                 // assembled p1 + p2 + p3
};

/// Material derivative of the pressure: laplacian(D_t p) = p1 + p2 + p3 with
/// p1 = 4 <grad u, hess p>, p2 = 2 tr((grad u)^3), p3 = -(lap u) . grad p,
/// zero Dirichlet data (p vanishes identically on the material boundary).
MaterialPressure material_pressure_solve(const FlowState& state, const ScalarField3& p);

struct VelocitySplit {
    VectorField3 u0;   // vorticity part: lap u0 = curl omega, u0 = 0 on boundary
    VectorField3 u1;   // harmonic part with boundary trace U
    double residual;   // relative L2 of u - u0 - u1
};

/// Splits the velocity into the vorticity-driven interior part and the
/// harmonic extension of its boundary trace.
VelocitySplit velocity_split(const FlowState& state, const LayerOperator& op);

} // namespace fbeuler
