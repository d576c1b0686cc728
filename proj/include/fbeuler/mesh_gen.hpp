#pragma once

#include <functional>
#include <vector>

#include "fbeuler/surface_mesh.hpp"

namespace fbeuler {

/// Icosphere of radius R: subdivided icosahedron with vertices projected to
/// the sphere. Vertex counts: 12, 42, 162, 642, 2562, ... per level.
SurfaceMesh icosphere(int subdiv, double radius = 1.0,
                      const Vec3& center = Vec3::Zero());

/// Axis-aligned ellipsoid with semi-axes (a, b, c), built by scaling an
/// icosphere.
SurfaceMesh ellipsoid(int subdiv, double a, double b, double c);

/// One spherical-harmonic perturbation term of a radial graph surface.
struct HarmonicBump {
    int l = 0;
    int m = 0;
    double amplitude = 0.0;
};

/// r(x^) = R * (1 + sum_k a_k Y_{l_k m_k}(x^)) over an icosphere
/// parameterization.
SurfaceMesh perturbed_sphere(int subdiv, double radius,
                             const std::vector<HarmonicBump>& bumps);

/// Closed surface of revolution around the z axis. profile(z) must be
/// positive on (z_min, z_max) and vanish at the endpoints (poles).
SurfaceMesh surface_of_revolution(const std::function<double(double)>& profile,
                                  double z_min, double z_max,
                                  int n_z, int n_theta);

/// Two unit spheres centered at (0,0,+-separation) bridged by a smooth
/// hyperboloid-like neck of the given waist radius.
SurfaceMesh dumbbell(double neck_radius = 0.1, double separation = 1.8,
                     int n_z = 120, int n_theta = 32);

} // namespace fbeuler
