#pragma once

#include <vector>

#include "fbeuler/surface_mesh.hpp"

namespace fbeuler {

/// Second fundamental form per vertex, stored in the deterministic
/// orthonormal tangent frame of SurfaceMesh::tangent_frame. Sign convention:
/// a sphere of radius R with outward normal has kappa1 = kappa2 = +1/R.
struct CurvatureData {
    std::vector<Eigen::Matrix2d> theta;               // symmetric
    std::vector<std::pair<double, double>> principal; // kappa1 <= kappa2
    std::vector<Vec3> fitted_normals;                 // quadric-corrected, unit
    double theta_sup = 0.0;                           // sup of Frobenius norms
};

/// Geometric control quantities entering the continuation functionals.
struct GeometryBounds {
    double iota0 = 0.0;       // normal injectivity radius estimate
    double r_exterior = 0.0;  // uniform exterior sphere radius estimate
    double K_geom = 0.0;      // theta_sup + 1/iota0
};

/// Per-vertex quadric fit (least-squares paraboloid over the 2-ring in the
/// tangent frame). Requires >= 162 vertices and >= 5 distinct 2-ring
/// neighbors per vertex; otherwise throws InsufficientNeighborhood.
CurvatureData second_fundamental_form(const SurfaceMesh& mesh);

/// Reach-style proxy: minimum over vertices of the principal curvature
/// radius, and over vertex pairs (y outside the 2-ring of x) of
/// |x-y|^2 / (2 |<x-y, N(x)>|). Clamped to cap.
double injectivity_radius(const SurfaceMesh& mesh, double cap);
double injectivity_radius(const SurfaceMesh& mesh, const CurvatureData& curv,
                          double cap);

/// Largest r <= r_max such that for every vertex x the open ball of radius r
/// centered at x + r N(x) contains no other mesh vertex; bisection to 1e-3
/// relative.
double exterior_sphere_radius(const SurfaceMesh& mesh, double r_max);

/// Combines theta_sup, iota0 and the exterior-sphere estimate.
GeometryBounds geometry_bounds(const SurfaceMesh& mesh, double cap = 1e6);

} // namespace fbeuler
