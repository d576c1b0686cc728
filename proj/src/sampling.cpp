#include "fbeuler/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "fbeuler/curvature.hpp"

namespace fbeuler {

namespace {

// Ericson, Real-Time Collision Detection 5.1.5
Vec3 closest_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                            int& feature) {
    // feature: 0..2 vertex a/b/c, 3..5 edge ab/ac/bc, 6 face
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) { feature = 0; return a; }
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) { feature = 1; return b; }
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) { feature = 3; return a + (d1 / (d1 - d3)) * ab; }
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) { feature = 2; return c; }
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) { feature = 4; return a + (d2 / (d2 - d6)) * ac; }
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        feature = 5;
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }
    feature = 6;
    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

} // namespace

TriangleGrid::TriangleGrid(const SurfaceMesh& mesh, double bucket_size) : mesh_(&mesh) {
    Vec3 lo = mesh.vertices[0], hi = mesh.vertices[0];
    double max_diam = 0.0;
    for (const Vec3& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        for (int e = 0; e < 3; ++e) {
            max_diam = std::max(max_diam,
                                (mesh.vertices[t[e]] - mesh.vertices[t[(e + 1) % 3]]).norm());
        }
    }
    bucket_ = std::max(bucket_size, max_diam) * 1.0001;
    lo_ = lo - Vec3::Constant(bucket_);
    Vec3 span = hi + Vec3::Constant(bucket_) - lo_;
    for (int a = 0; a < 3; ++a) dims_[a] = std::max(1, int(std::ceil(span[a] / bucket_)) + 1);
    buckets_.assign(size_t(dims_[0]) * dims_[1] * dims_[2], {});

    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        Vec3 flo = mesh.vertices[t[0]].cwiseMin(mesh.vertices[t[1]]).cwiseMin(mesh.vertices[t[2]]);
        Vec3 fhi = mesh.vertices[t[0]].cwiseMax(mesh.vertices[t[1]]).cwiseMax(mesh.vertices[t[2]]);
        int i0[3], i1[3];
        for (int a = 0; a < 3; ++a) {
            i0[a] = std::clamp(int((flo[a] - lo_[a]) / bucket_), 0, dims_[a] - 1);
            i1[a] = std::clamp(int((fhi[a] - lo_[a]) / bucket_), 0, dims_[a] - 1);
        }
        for (int k = i0[2]; k <= i1[2]; ++k) {
            for (int j = i0[1]; j <= i1[1]; ++j) {
                for (int i = i0[0]; i <= i1[0]; ++i) {
                    buckets_[bucket_index(i, j, k)].push_back(f);
                }
            }
        }
    }

    face_normals_.resize(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) face_normals_[f] = mesh.face_normal(f);

    // angle-weighted pseudonormals give a robust inside/outside sign at
    // vertices and edges
    vertex_pseudonormals_.assign(mesh.vertex_count(), Vec3::Zero());
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            const Vec3& v = mesh.vertices[t[k]];
            Vec3 e1 = (mesh.vertices[t[(k + 1) % 3]] - v).normalized();
            Vec3 e2 = (mesh.vertices[t[(k + 2) % 3]] - v).normalized();
            double ang = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
            vertex_pseudonormals_[t[k]] += ang * face_normals_[f];
        }
    }
    for (Vec3& n : vertex_pseudonormals_) n.normalize();
}

std::pair<Vec3, int> TriangleGrid::closest_point(const Vec3& p) const {
    int ci[3];
    for (int a = 0; a < 3; ++a) {
        ci[a] = std::clamp(int((p[a] - lo_[a]) / bucket_), 0, dims_[a] - 1);
    }
    double best_d2 = std::numeric_limits<double>::max();
    Vec3 best_point = Vec3::Zero();
    int best_tri = -1;
    int max_ring = dims_[0] + dims_[1] + dims_[2];
    for (int ring = 0; ring <= max_ring; ++ring) {
        // triangles in rings beyond r are at least (r-1) buckets away
        if (best_tri >= 0 && std::sqrt(best_d2) < (ring - 1.0) * bucket_) break;
        for (int k = std::max(0, ci[2] - ring); k <= std::min(dims_[2] - 1, ci[2] + ring); ++k) {
            for (int j = std::max(0, ci[1] - ring); j <= std::min(dims_[1] - 1, ci[1] + ring); ++j) {
                for (int i = std::max(0, ci[0] - ring); i <= std::min(dims_[0] - 1, ci[0] + ring); ++i) {
                    if (ring > 0 && std::abs(i - ci[0]) != ring && std::abs(j - ci[1]) != ring &&
                        std::abs(k - ci[2]) != ring) {
                        continue;  // shell interior was visited in earlier rings
                    }
                    for (int f : buckets_[bucket_index(i, j, k)]) {
                        const auto& t = mesh_->faces[f];
                        int feat;
                        Vec3 q = closest_point_triangle(p, mesh_->vertices[t[0]],
                                                        mesh_->vertices[t[1]],
                                                        mesh_->vertices[t[2]], feat);
                        double d2 = (p - q).squaredNorm();
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best_point = q;
                            best_tri = f;
                        }
                    }
                }
            }
        }
    }
    return {best_point, best_tri};
}

double TriangleGrid::signed_distance(const Vec3& p, Vec3* closest, int* tri) const {
    auto [q, f] = closest_point(p);
    if (closest) *closest = q;
    if (tri) *tri = f;
    const auto& t = mesh_->faces[f];
    int feat;
    closest_point_triangle(p, mesh_->vertices[t[0]], mesh_->vertices[t[1]],
                           mesh_->vertices[t[2]], feat);
    Vec3 pseudo;
    if (feat == 6) {
        pseudo = face_normals_[f];
    } else if (feat < 3) {
        pseudo = vertex_pseudonormals_[t[feat]];
    } else {
        // edge: average of face normals; query the two endpoint vertices
        int a = feat == 3 ? t[0] : (feat == 4 ? t[0] : t[1]);
        int b = feat == 3 ? t[1] : (feat == 4 ? t[2] : t[2]);
        pseudo = (vertex_pseudonormals_[a] + vertex_pseudonormals_[b]).normalized();
    }
    double d = (p - q).norm();
    return pseudo.dot(p - q) >= 0.0 ? d : -d;
}

double TriangleGrid::interpolate(const std::vector<double>& vertex_data, const Vec3& p) const {
    auto [q, f] = closest_point(p);
    const auto& t = mesh_->faces[f];
    const Vec3 &a = mesh_->vertices[t[0]], &b = mesh_->vertices[t[1]], &c = mesh_->vertices[t[2]];
    Vec3 v0 = b - a, v1 = c - a, v2 = q - a;
    double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
    double d20 = v2.dot(v0), d21 = v2.dot(v1);
    double denom = d00 * d11 - d01 * d01;
    double w1 = (d11 * d20 - d01 * d21) / denom;
    double w2 = (d00 * d21 - d01 * d20) / denom;
    double w0 = 1.0 - w1 - w2;
    return w0 * vertex_data[t[0]] + w1 * vertex_data[t[1]] + w2 * vertex_data[t[2]];
}

InteriorSampling build_sampling(std::shared_ptr<const SurfaceMesh> mesh, double h) {
    if (!mesh) throw Error("build_sampling: null mesh");
    if (!(h > 0)) throw Error("build_sampling: h must be positive");

    InteriorSampling g;
    g.mesh = mesh;
    g.h = h;

    // resolution guard against the minimum feature size
    CurvatureData curv = second_fundamental_form(*mesh);
    g.iota0_estimate = injectivity_radius(*mesh, curv, 1e6);
    if (2.0 * g.iota0_estimate / h < 10.0) {
        throw ResolutionTooCoarse("fewer than 10 cells across the minimum feature (2 iota0 = " +
                                  std::to_string(2.0 * g.iota0_estimate) + ", h = " +
                                  std::to_string(h) + ")");
    }

    Vec3 lo = mesh->vertices[0], hi = mesh->vertices[0];
    for (const Vec3& v : mesh->vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    g.origin = lo - Vec3::Constant(4.0 * h);
    Vec3 span = hi + Vec3::Constant(4.0 * h) - g.origin;
    for (int a = 0; a < 3; ++a) g.dims[a] = int(std::ceil(span[a] / h)) + 1;

    const int n = g.total_cells();
    g.sdist.assign(n, std::numeric_limits<double>::max());
    g.cls.assign(n, CellClass::Outside);
    g.nearest_point.assign(n, Vec3::Zero());
    g.nearest_tri.assign(n, -1);

    g.surface = std::make_shared<TriangleGrid>(*mesh, 3.0 * h);

    // exact signed distances in a 3h band: candidate cells from triangle
    // bounding boxes
    const double band = 3.0 * h;
    std::vector<std::uint8_t> candidate(n, 0);
    for (int f = 0; f < mesh->face_count(); ++f) {
        const auto& t = mesh->faces[f];
        Vec3 flo = mesh->vertices[t[0]].cwiseMin(mesh->vertices[t[1]]).cwiseMin(mesh->vertices[t[2]]);
        Vec3 fhi = mesh->vertices[t[0]].cwiseMax(mesh->vertices[t[1]]).cwiseMax(mesh->vertices[t[2]]);
        int i0[3], i1[3];
        for (int a = 0; a < 3; ++a) {
            i0[a] = std::max(0, int(std::floor((flo[a] - band - g.origin[a]) / h)));
            i1[a] = std::min(g.dims[a] - 1, int(std::ceil((fhi[a] + band - g.origin[a]) / h)));
        }
        for (int k = i0[2]; k <= i1[2]; ++k) {
            for (int j = i0[1]; j <= i1[1]; ++j) {
                for (int i = i0[0]; i <= i1[0]; ++i) candidate[g.lin(i, j, k)] = 1;
            }
        }
    }

    std::vector<std::uint8_t> frozen(n, 0);
    for (int idx = 0; idx < n; ++idx) {
        if (!candidate[idx]) continue;
        Vec3 cp;
        int tri;
        double sd = g.surface->signed_distance(g.center(idx), &cp, &tri);
        if (std::abs(sd) <= band) {
            g.sdist[idx] = sd;
            g.nearest_point[idx] = cp;
            g.nearest_tri[idx] = tri;
            frozen[idx] = 1;
        }
    }

    // flood fill from the grid hull: non-frozen cells reachable without
    // crossing the band are outside
    std::vector<std::uint8_t> outside(n, 0);
    {
        std::queue<int> todo;
        auto push = [&](int i, int j, int k) {
            int idx = g.lin(i, j, k);
            if (!frozen[idx] && !outside[idx]) {
                outside[idx] = 1;
                todo.push(idx);
            }
        };
        for (int k = 0; k < g.dims[2]; ++k) {
            for (int j = 0; j < g.dims[1]; ++j) {
                push(0, j, k);
                push(g.dims[0] - 1, j, k);
            }
        }
        for (int k = 0; k < g.dims[2]; ++k) {
            for (int i = 0; i < g.dims[0]; ++i) {
                push(i, 0, k);
                push(i, g.dims[1] - 1, k);
            }
        }
        for (int j = 0; j < g.dims[1]; ++j) {
            for (int i = 0; i < g.dims[0]; ++i) {
                push(i, j, 0);
                push(i, j, g.dims[2] - 1);
            }
        }
        const int di[6] = {1, -1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, 1, -1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, 1, -1};
        while (!todo.empty()) {
            int idx = todo.front();
            todo.pop();
            int i = idx % g.dims[0], j = (idx / g.dims[0]) % g.dims[1],
                k = idx / (g.dims[0] * g.dims[1]);
            for (int d = 0; d < 6; ++d) {
                int ii = i + di[d], jj = j + dj[d], kk = k + dk[d];
                if (g.in_bounds(ii, jj, kk)) push(ii, jj, kk);
            }
        }
    }

    // closest-point sweeping away from the band: propagate nearest surface
    // points instead of solving the eikonal update, which keeps far-field
    // distances essentially exact (each value is a true distance to a
    // surface point)
    {
        std::vector<double> dist(n);
        std::vector<Vec3> cp(n, Vec3::Zero());
        std::vector<std::uint8_t> has(n, 0);
        for (int idx = 0; idx < n; ++idx) {
            if (frozen[idx]) {
                dist[idx] = std::abs(g.sdist[idx]);
                cp[idx] = g.nearest_point[idx];
                has[idx] = 1;
            } else {
                dist[idx] = std::numeric_limits<double>::max();
            }
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (int sweep = 0; sweep < 8; ++sweep) {
                int si = (sweep & 1) ? -1 : 1;
                int sj = (sweep & 2) ? -1 : 1;
                int sk = (sweep & 4) ? -1 : 1;
                for (int k = sk > 0 ? 0 : g.dims[2] - 1; k >= 0 && k < g.dims[2]; k += sk) {
                    for (int j = sj > 0 ? 0 : g.dims[1] - 1; j >= 0 && j < g.dims[1]; j += sj) {
                        for (int i = si > 0 ? 0 : g.dims[0] - 1; i >= 0 && i < g.dims[0]; i += si) {
                            int idx = g.lin(i, j, k);
                            if (frozen[idx]) continue;
                            Vec3 x = g.center(i, j, k);
                            const int di[6] = {1, -1, 0, 0, 0, 0};
                            const int dj[6] = {0, 0, 1, -1, 0, 0};
                            const int dk[6] = {0, 0, 0, 0, 1, -1};
                            for (int d = 0; d < 6; ++d) {
                                int ii = i + di[d], jj = j + dj[d], kk = k + dk[d];
                                if (!g.in_bounds(ii, jj, kk)) continue;
                                int nidx = g.lin(ii, jj, kk);
                                if (!has[nidx]) continue;
                                double cand = (x - cp[nidx]).norm();
                                if (cand < dist[idx]) {
                                    dist[idx] = cand;
                                    cp[idx] = cp[nidx];
                                    has[idx] = 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        for (int idx = 0; idx < n; ++idx) {
            if (!frozen[idx]) {
                g.sdist[idx] = outside[idx] ? dist[idx] : -dist[idx];
                g.nearest_point[idx] = cp[idx];
            }
        }
    }

    // classification and solver-cell count
    g.solver_cell_count = 0;
    for (int idx = 0; idx < n; ++idx) {
        if (std::abs(g.sdist[idx]) <= 2.0 * h) {
            g.cls[idx] = CellClass::Band;
        } else {
            g.cls[idx] = g.sdist[idx] < 0.0 ? CellClass::Inside : CellClass::Outside;
        }
        if (g.sdist[idx] < 0.0) ++g.solver_cell_count;
    }
    if (g.solver_cell_count == 0) throw ResolutionTooCoarse("no interior cells at this h");

    // the interior must be a single 6-connected component
    {
        std::vector<std::uint8_t> seen(n, 0);
        int seed = -1;
        for (int idx = 0; idx < n; ++idx) {
            if (g.sdist[idx] < 0.0) { seed = idx; break; }
        }
        std::queue<int> todo;
        todo.push(seed);
        seen[seed] = 1;
        int count = 1;
        const int di[6] = {1, -1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, 1, -1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, 1, -1};
        while (!todo.empty()) {
            int idx = todo.front();
            todo.pop();
            int i = idx % g.dims[0], j = (idx / g.dims[0]) % g.dims[1],
                k = idx / (g.dims[0] * g.dims[1]);
            for (int d = 0; d < 6; ++d) {
                int ii = i + di[d], jj = j + dj[d], kk = k + dk[d];
                if (!g.in_bounds(ii, jj, kk)) continue;
                int nidx = g.lin(ii, jj, kk);
                if (!seen[nidx] && g.sdist[nidx] < 0.0) {
                    seen[nidx] = 1;
                    ++count;
                    todo.push(nidx);
                }
            }
        }
        if (count != g.solver_cell_count) {
            throw ResolutionTooCoarse("interior cells form more than one connected component");
        }
    }
    return g;
}

} // namespace fbeuler
