#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbeuler/errors.hpp"

namespace fbeuler {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Closed, oriented, connected triangulated surface with per-vertex geometry.
///
/// Invariants established by build_surface():
///  - every edge is shared by exactly two faces,
///  - face orientations are globally consistent and the signed enclosed
///    volume is positive,
///  - vertex normals are unit to 1e-12,
///  - vertex areas sum to the total face area.
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    std::vector<Vec3> vertex_normals;       // unit, outward
    std::vector<double> vertex_areas;       // barycentric quadrature weights

    std::vector<std::vector<int>> vertex_neighbors;  // 1-ring, sorted
    std::vector<std::vector<int>> vertex_face_ids;   // incident faces
    std::vector<double> local_spacing;               // mean incident edge length

    double total_area = 0.0;
    double signed_volume = 0.0;
    double mean_edge_length = 0.0;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }

    Vec3 face_normal(int f) const;
    double face_area(int f) const;
    Vec3 face_centroid(int f) const;

    /// Deterministic orthonormal tangent frame (t1, t2) at a vertex with
    /// t1 x t2 = N.
    std::pair<Vec3, Vec3> tangent_frame(int v) const;

    /// 2-ring neighborhood (excludes the vertex itself), sorted.
    std::vector<int> two_ring(int v) const;

    /// Minimum triangle aspect quality, 4*sqrt(3)*area / sum of squared
    /// edge lengths; 1 for equilateral.
    double min_triangle_quality() const;
};

/// Validates connectivity and orientation, computes normals, areas and
/// adjacency. Throws NonManifold, InvertedOrientation or DegenerateFace.
SurfaceMesh build_surface(std::vector<Vec3> vertices,
                          std::vector<std::array<int, 3>> faces);

/// Recompute derived geometry (normals, areas, adjacency caches) after the
/// vertex positions of an already validated mesh changed. Connectivity is
/// not re-validated; orientation is (volume must stay positive).
void refresh_geometry(SurfaceMesh& mesh);

// --- boundary calculus -----------------------------------------------------

/// Vertex-quadrature surface integral, sum of f(v) * vertex_area(v).
double boundary_integral(const SurfaceMesh& mesh, const std::vector<double>& f);

/// Pointwise tangential projection v - <v,N> N.
std::vector<Vec3> project_tangential(const SurfaceMesh& mesh,
                                     const std::vector<Vec3>& v);

/// Tangential gradient by least-squares linear fit of f over the 1-ring in
/// the vertex tangent plane. Result is orthogonal to the vertex normal.
std::vector<Vec3> tangential_gradient(const SurfaceMesh& mesh,
                                      const std::vector<double>& f);

// --- OFF file I/O ----------------------------------------------------------

/// Writes OFF with 17 significant digits.
void write_off(const std::string& path, const SurfaceMesh& mesh);

/// Reads an OFF file and validates it through build_surface().
SurfaceMesh read_off(const std::string& path);

} // namespace fbeuler
