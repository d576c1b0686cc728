#include "fbeuler/surface_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace fbeuler {

Vec3 SurfaceMesh::face_normal(int f) const {
    const auto& t = faces[f];
    Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    double len = n.norm();
    if (len == 0.0) return Vec3::Zero();
    return n / len;
}

double SurfaceMesh::face_area(int f) const {
    const auto& t = faces[f];
    return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
}

Vec3 SurfaceMesh::face_centroid(int f) const {
    const auto& t = faces[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

std::pair<Vec3, Vec3> SurfaceMesh::tangent_frame(int v) const {
    const Vec3& n = vertex_normals[v];
    // pick the coordinate axis least aligned with n
    int k = 0;
    double best = std::abs(n[0]);
    for (int i = 1; i < 3; ++i) {
        if (std::abs(n[i]) < best) { best = std::abs(n[i]); k = i; }
    }
    Vec3 axis = Vec3::Zero();
    axis[k] = 1.0;
    Vec3 t1 = (axis - axis.dot(n) * n).normalized();
    Vec3 t2 = n.cross(t1);
    return {t1, t2};
}

std::vector<int> SurfaceMesh::two_ring(int v) const {
    std::set<int> ring(vertex_neighbors[v].begin(), vertex_neighbors[v].end());
    for (int w : vertex_neighbors[v]) {
        for (int z : vertex_neighbors[w]) {
            if (z != v) ring.insert(z);
        }
    }
    return std::vector<int>(ring.begin(), ring.end());
}

double SurfaceMesh::min_triangle_quality() const {
    double q_min = 1.0;
    for (int f = 0; f < face_count(); ++f) {
        const auto& t = faces[f];
        double e0 = (vertices[t[1]] - vertices[t[0]]).squaredNorm();
        double e1 = (vertices[t[2]] - vertices[t[1]]).squaredNorm();
        double e2 = (vertices[t[0]] - vertices[t[2]]).squaredNorm();
        double s = e0 + e1 + e2;
        double q = s > 0.0 ? 4.0 * std::sqrt(3.0) * face_area(f) / s : 0.0;
        q_min = std::min(q_min, q);
    }
    return q_min;
}

namespace {

double compute_signed_volume(const std::vector<Vec3>& verts,
                             const std::vector<std::array<int, 3>>& faces) {
    double vol = 0.0;
    for (const auto& t : faces) {
        vol += verts[t[0]].dot(verts[t[1]].cross(verts[t[2]]));
    }
    return vol / 6.0;
}

// Orient all faces consistently by flood fill over shared edges. Throws
// NonManifold on conflicts (Moebius-like input) or disconnected meshes.
void orient_consistently(std::vector<std::array<int, 3>>& faces, int n_vertices) {
    struct EdgeUse { int face; bool forward; };
    std::map<std::pair<int, int>, std::vector<EdgeUse>> edge_faces;
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
        for (int e = 0; e < 3; ++e) {
            int a = faces[f][e], b = faces[f][(e + 1) % 3];
            if (a == b) throw DegenerateFace("face with repeated vertex index");
            edge_faces[key(a, b)].push_back({f, a < b});
        }
    }
    for (const auto& [k, uses] : edge_faces) {
        if (uses.size() != 2) {
            throw NonManifold("edge (" + std::to_string(k.first) + "," +
                              std::to_string(k.second) + ") has " +
                              std::to_string(uses.size()) + " incident faces");
        }
    }

    std::vector<int> flip(faces.size(), -1);  // -1 unvisited, 0 keep, 1 flip
    flip[0] = 0;
    std::queue<int> todo;
    todo.push(0);
    int visited = 1;
    while (!todo.empty()) {
        int f = todo.front();
        todo.pop();
        for (int e = 0; e < 3; ++e) {
            int a = faces[f][e], b = faces[f][(e + 1) % 3];
            if (flip[f]) std::swap(a, b);  // effective direction after flip
            for (const auto& use : edge_faces[key(a, b)]) {
                if (use.face == f) continue;
                int g = use.face;
                // g's effective use of this edge must be opposite to f's
                bool g_forward = use.forward;
                bool f_forward = a < b;
                int need_flip = (g_forward == f_forward) ? 1 : 0;
                if (flip[g] == -1) {
                    flip[g] = need_flip;
                    ++visited;
                    todo.push(g);
                } else if (flip[g] != need_flip) {
                    throw NonManifold("mesh is not orientable");
                }
            }
        }
    }
    if (visited != static_cast<int>(faces.size())) {
        throw NonManifold("mesh has more than one connected component");
    }
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
        if (flip[f]) std::swap(faces[f][1], faces[f][2]);
    }
}

} // namespace

void refresh_geometry(SurfaceMesh& mesh) {
    const int nv = mesh.vertex_count();
    const int nf = mesh.face_count();

    mesh.signed_volume = compute_signed_volume(mesh.vertices, mesh.faces);
    if (mesh.signed_volume <= 0.0) {
        throw InvertedOrientation("signed enclosed volume is not positive");
    }

    double mean_area = 0.0;
    std::vector<double> face_areas(nf);
    for (int f = 0; f < nf; ++f) {
        face_areas[f] = mesh.face_area(f);
        mean_area += face_areas[f];
    }
    mean_area /= nf;
    for (int f = 0; f < nf; ++f) {
        if (face_areas[f] < 1e-14 * mean_area) {
            throw DegenerateFace("face " + std::to_string(f) + " area below 1e-14 of mean");
        }
    }

    mesh.vertex_normals.assign(nv, Vec3::Zero());
    mesh.vertex_areas.assign(nv, 0.0);
    mesh.total_area = 0.0;
    for (int f = 0; f < nf; ++f) {
        const auto& t = mesh.faces[f];
        Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                     .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        // n has magnitude 2*area; accumulating it area-weights the normals
        for (int k = 0; k < 3; ++k) {
            mesh.vertex_normals[t[k]] += n;
            mesh.vertex_areas[t[k]] += face_areas[f] / 3.0;
        }
        mesh.total_area += face_areas[f];
    }
    for (int v = 0; v < nv; ++v) {
        double len = mesh.vertex_normals[v].norm();
        if (len == 0.0) throw DegenerateFace("vertex " + std::to_string(v) + " has zero normal");
        mesh.vertex_normals[v] /= len;
    }

    mesh.vertex_neighbors.assign(nv, {});
    mesh.vertex_face_ids.assign(nv, {});
    {
        std::vector<std::set<int>> nbr(nv);
        for (int f = 0; f < nf; ++f) {
            const auto& t = mesh.faces[f];
            for (int k = 0; k < 3; ++k) {
                mesh.vertex_face_ids[t[k]].push_back(f);
                nbr[t[k]].insert(t[(k + 1) % 3]);
                nbr[t[k]].insert(t[(k + 2) % 3]);
            }
        }
        for (int v = 0; v < nv; ++v) {
            mesh.vertex_neighbors[v].assign(nbr[v].begin(), nbr[v].end());
        }
    }

    mesh.local_spacing.assign(nv, 0.0);
    double edge_sum = 0.0;
    long edge_count = 0;
    for (int v = 0; v < nv; ++v) {
        double s = 0.0;
        for (int w : mesh.vertex_neighbors[v]) {
            s += (mesh.vertices[v] - mesh.vertices[w]).norm();
        }
        mesh.local_spacing[v] = s / std::max<size_t>(1, mesh.vertex_neighbors[v].size());
        edge_sum += s;
        edge_count += static_cast<long>(mesh.vertex_neighbors[v].size());
    }
    mesh.mean_edge_length = edge_sum / std::max<long>(1, edge_count);
}

SurfaceMesh build_surface(std::vector<Vec3> vertices,
                          std::vector<std::array<int, 3>> faces) {
    if (vertices.size() < 4) throw Error("need at least 4 vertices");
    if (faces.size() < 4) throw Error("need at least 4 faces");
    const int nv = static_cast<int>(vertices.size());
    for (const auto& t : faces) {
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) throw Error("face references invalid vertex index");
        }
    }

    orient_consistently(faces, nv);
    if (compute_signed_volume(vertices, faces) < 0.0) {
        for (auto& t : faces) std::swap(t[1], t[2]);
    }

    SurfaceMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.faces = std::move(faces);
    refresh_geometry(mesh);
    return mesh;
}

double boundary_integral(const SurfaceMesh& mesh, const std::vector<double>& f) {
    if (f.size() != mesh.vertices.size()) throw Error("field size mismatch");
    double s = 0.0;
    for (int v = 0; v < mesh.vertex_count(); ++v) s += f[v] * mesh.vertex_areas[v];
    return s;
}

std::vector<Vec3> project_tangential(const SurfaceMesh& mesh, const std::vector<Vec3>& v) {
    if (v.size() != mesh.vertices.size()) throw Error("field size mismatch");
    std::vector<Vec3> out(v.size());
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        const Vec3& n = mesh.vertex_normals[i];
        out[i] = v[i] - v[i].dot(n) * n;
    }
    return out;
}

std::vector<Vec3> tangential_gradient(const SurfaceMesh& mesh, const std::vector<double>& f) {
    if (f.size() != mesh.vertices.size()) throw Error("field size mismatch");
    std::vector<Vec3> out(f.size());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const auto& ring = mesh.vertex_neighbors[v];
        if (ring.size() < 3) {
            throw InsufficientNeighborhood("vertex " + std::to_string(v) +
                                           " has fewer than 3 neighbors");
        }
        auto [t1, t2] = mesh.tangent_frame(v);
        // normalize local coordinates so the fit is exactly scale-equivariant
        double scale = mesh.local_spacing[v];
        Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
        Eigen::Vector2d atb = Eigen::Vector2d::Zero();
        for (int w : ring) {
            Vec3 d = mesh.vertices[w] - mesh.vertices[v];
            Eigen::Vector2d xi(d.dot(t1) / scale, d.dot(t2) / scale);
            double df = f[w] - f[v];
            ata += xi * xi.transpose();
            atb += xi * df;
        }
        Eigen::Vector2d g = ata.ldlt().solve(atb);
        out[v] = (g[0] * t1 + g[1] * t2) / scale;
    }
    return out;
}

void write_off(const std::string& path, const SurfaceMesh& mesh) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "OFF\n" << mesh.vertex_count() << " " << mesh.face_count() << " 0\n";
    char buf[128];
    for (const auto& p : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
        os << buf;
    }
    for (const auto& t : mesh.faces) {
        os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    }
    if (!os) throw IoError("write failed for " + path);
}

SurfaceMesh read_off(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::string header;
    is >> header;
    if (header != "OFF") throw IoError(path + ": missing OFF header");
    int nv = 0, nf = 0, ne = 0;
    is >> nv >> nf >> ne;
    if (!is || nv <= 0 || nf <= 0) throw IoError(path + ": bad counts line");
    std::vector<Vec3> vertices(nv);
    for (int v = 0; v < nv; ++v) {
        is >> vertices[v][0] >> vertices[v][1] >> vertices[v][2];
    }
    std::vector<std::array<int, 3>> faces(nf);
    for (int f = 0; f < nf; ++f) {
        int k = 0;
        is >> k;
        if (k != 3) throw IoError(path + ": only triangle faces supported");
        is >> faces[f][0] >> faces[f][1] >> faces[f][2];
    }
    if (!is) throw IoError(path + ": truncated file");
    return build_surface(std::move(vertices), std::move(faces));
}

} // namespace fbeuler
