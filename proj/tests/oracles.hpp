// Independent brute-force oracles used by the test suites. These deliberately
// avoid the library's own code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "fbeuler/surface_mesh.hpp"

namespace oracles {

using fbeuler::Vec3;

// Signed volume by the direct determinant sum over face tetrahedra.
inline double signed_volume(const std::vector<Vec3>& verts,
                            const std::vector<std::array<int, 3>>& faces) {
    double v = 0.0;
    for (const auto& t : faces) {
        const Vec3 &a = verts[t[0]], &b = verts[t[1]], &c = verts[t[2]];
        v += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
             a[2] * (b[0] * c[1] - b[1] * c[0]);
    }
    return v / 6.0;
}

// Closest point on a triangle (Ericson, Real-Time Collision Detection).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return a;
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }
    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

// Unsigned distance from a point to a triangulated surface, all triangles.
inline double distance_to_mesh(const Vec3& p, const fbeuler::SurfaceMesh& mesh) {
    double best = std::numeric_limits<double>::max();
    for (const auto& t : mesh.faces) {
        Vec3 q = closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                           mesh.vertices[t[2]]);
        best = std::min(best, (p - q).norm());
    }
    return best;
}

// Reach proxy over all vertex pairs excluding the 2-ring, straight loops.
inline double reach_pairs(const fbeuler::SurfaceMesh& mesh) {
    double best = std::numeric_limits<double>::max();
    int nv = mesh.vertex_count();
    for (int v = 0; v < nv; ++v) {
        std::set<int> excl;
        for (int w : mesh.vertex_neighbors[v]) {
            excl.insert(w);
            for (int z : mesh.vertex_neighbors[w]) excl.insert(z);
        }
        for (int w = 0; w < nv; ++w) {
            if (w == v || excl.count(w)) continue;
            Vec3 d = mesh.vertices[v] - mesh.vertices[w];
            double den = 2.0 * std::abs(d.dot(mesh.vertex_normals[v]));
            if (den < 1e-300) continue;
            best = std::min(best, d.squaredNorm() / den);
        }
    }
    return best;
}

// Ball-emptiness probe: true if some vertex's exterior ball of radius r
// contains another vertex.
inline bool exterior_ball_blocked(const fbeuler::SurfaceMesh& mesh, double r) {
    int nv = mesh.vertex_count();
    for (int v = 0; v < nv; ++v) {
        Vec3 c = mesh.vertices[v] + r * mesh.vertex_normals[v];
        for (int w = 0; w < nv; ++w) {
            if (w != v && (mesh.vertices[w] - c).squaredNorm() < r * r * (1 - 1e-12)) {
                return true;
            }
        }
    }
    return false;
}

} // namespace oracles
