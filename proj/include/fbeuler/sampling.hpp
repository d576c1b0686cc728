#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "fbeuler/surface_mesh.hpp"

namespace fbeuler {

enum class CellClass : std::uint8_t { Outside = 0, Band = 1, Inside = 2 };

/// Uniform-bucket acceleration structure for closest-point queries against
/// the triangles of a mesh.
class TriangleGrid {
public:
    TriangleGrid(const SurfaceMesh& mesh, double bucket_size);

    /// Exact closest point on the surface; returns (point, triangle id).
    std::pair<Vec3, int> closest_point(const Vec3& p) const;

    /// Signed distance via the angle-weighted pseudonormal of the closest
    /// feature (negative inside).
    double signed_distance(const Vec3& p, Vec3* closest = nullptr,
                           int* tri = nullptr) const;

    /// Interpolates per-vertex data barycentrically at the closest point.
    double interpolate(const std::vector<double>& vertex_data, const Vec3& p) const;

private:
    const SurfaceMesh* mesh_;
    Vec3 lo_;
    double bucket_;
    std::array<int, 3> dims_;
    std::vector<std::vector<int>> buckets_;
    std::vector<Vec3> vertex_pseudonormals_;  // angle-weighted
    std::vector<Vec3> face_normals_;

    int bucket_index(int i, int j, int k) const {
        return (k * dims_[1] + j) * dims_[0] + i;
    }
};

/// Embedded Cartesian grid clipped to the fluid domain: signed distance
/// (negative inside), cell classification and nearest-boundary data in a
/// band of width 3h around the surface (exact point-triangle queries there,
/// fast sweeping beyond).
struct InteriorSampling {
    std::shared_ptr<const SurfaceMesh> mesh;
    std::shared_ptr<const TriangleGrid> surface;

    Vec3 origin;                 // center of cell (0,0,0)
    double h = 0.0;
    std::array<int, 3> dims{};

    std::vector<double> sdist;
    std::vector<CellClass> cls;        // Band = within 2h of the surface
    std::vector<Vec3> nearest_point;   // exact for band cells
    std::vector<int> nearest_tri;      // -1 outside the exact band
    int solver_cell_count = 0;         // cells with sdist < 0
    double iota0_estimate = 0.0;

    int total_cells() const { return dims[0] * dims[1] * dims[2]; }
    int lin(int i, int j, int k) const { return (k * dims[1] + j) * dims[0] + i; }
    Vec3 center(int i, int j, int k) const {
        return origin + h * Vec3(double(i), double(j), double(k));
    }
    Vec3 center(int idx) const {
        int i = idx % dims[0], j = (idx / dims[0]) % dims[1], k = idx / (dims[0] * dims[1]);
        return center(i, j, k);
    }
    bool in_bounds(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
    }
    bool is_solver(int idx) const { return sdist[idx] < 0.0; }

    /// Smoothed cut-cell volume weight for interior quadrature.
    double cell_weight(int idx) const {
        double w = 0.5 - sdist[idx] / h;
        return w < 0.0 ? 0.0 : (w > 1.0 ? 1.0 : w);
    }
};

/// Builds the sampling. Throws ResolutionTooCoarse when fewer than 10 cells
/// span the minimum feature size (2 iota0) or the interior is disconnected
/// at this resolution.
InteriorSampling build_sampling(std::shared_ptr<const SurfaceMesh> mesh, double h);

} // namespace fbeuler
