#include "fbeuler/potential_theory.hpp"

#include <cmath>
#include <limits>

namespace fbeuler {

namespace {
constexpr double kFourPi = 4.0 * M_PI;

inline double double_layer_kernel(const Vec3& x, const Vec3& y, const Vec3& ny) {
    Vec3 d = x - y;
    double r = d.norm();
    return ny.dot(d) / (kFourPi * r * r * r);
}

// Degree-2 Gauss rule for the double-layer kernel times a linearly
// interpolated density over a flat triangle; subdivides recursively while
// the evaluation point is within ~3 triangle diameters. ValueT is double
// (evaluation) or Vec3 (the three hat functions at once, for assembly).
template <typename ValueT>
void face_dl_quadrature(const Vec3& x, const Vec3& face_normal,
                        const Vec3& a, const Vec3& b, const Vec3& c,
                        const ValueT& ma, const ValueT& mb, const ValueT& mc,
                        ValueT& acc, int depth) {
    double diam2 = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(),
                             (a - c).squaredNorm()});
    Vec3 centroid = (a + b + c) / 3.0;
    double d2 = (x - centroid).squaredNorm();
    if (depth < 6 && d2 < 9.0 * diam2) {
        Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
        ValueT mab = 0.5 * (ma + mb), mbc = 0.5 * (mb + mc), mca = 0.5 * (mc + ma);
        face_dl_quadrature(x, face_normal, a, ab, ca, ma, mab, mca, acc, depth + 1);
        face_dl_quadrature(x, face_normal, b, bc, ab, mb, mbc, mab, acc, depth + 1);
        face_dl_quadrature(x, face_normal, c, ca, bc, mc, mca, mbc, acc, depth + 1);
        face_dl_quadrature(x, face_normal, ab, bc, ca, mab, mbc, mca, acc, depth + 1);
        return;
    }
    double w = 0.5 * (b - a).cross(c - a).norm() / 3.0;
    // barycentric (2/3, 1/6, 1/6) permutations
    const Vec3 q[3] = {(4.0 * a + b + c) / 6.0, (a + 4.0 * b + c) / 6.0,
                       (a + b + 4.0 * c) / 6.0};
    const ValueT mq[3] = {(4.0 * ma + mb + mc) / 6.0, (ma + 4.0 * mb + mc) / 6.0,
                          (ma + mb + 4.0 * mc) / 6.0};
    for (int k = 0; k < 3; ++k) {
        double kv = double_layer_kernel(x, q[k], face_normal) * w;
        acc += kv * mq[k];
    }
}

} // namespace

LayerOperator::LayerOperator(const SurfaceMesh& mesh) : mesh_(&mesh) {
    const int n = mesh.vertex_count();
    if (n < 162) throw Error("layer operator requires at least 162 vertices");

    // Piecewise-linear collocation. Faces incident to the collocation vertex
    // contribute zero in the principal value (the flat-face kernel vanishes
    // in its own plane); the diagonal is completed afterwards so that the
    // interior-limit operator maps density 1 to exactly -1.
    system_.setZero(n, n);
    std::vector<Vec3> face_normals(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) face_normals[f] = mesh.face_normal(f);

    const Vec3 hat_a(1, 0, 0), hat_b(0, 1, 0), hat_c(0, 0, 1);
    for (int i = 0; i < n; ++i) {
        const Vec3& x = mesh.vertices[i];
        for (int f = 0; f < mesh.face_count(); ++f) {
            const auto& t = mesh.faces[f];
            if (t[0] == i || t[1] == i || t[2] == i) continue;
            Vec3 acc = Vec3::Zero();
            face_dl_quadrature(x, face_normals[f], mesh.vertices[t[0]],
                               mesh.vertices[t[1]], mesh.vertices[t[2]],
                               hat_a, hat_b, hat_c, acc, 0);
            system_(i, t[0]) += acc[0];
            system_(i, t[1]) += acc[1];
            system_(i, t[2]) += acc[2];
        }
    }
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) row_sum += system_(i, j);
        }
        system_(i, i) = -1.0 - row_sum;
    }

    lu_.compute(system_);
    cond_ = 1.0 / lu_.rcond();
    if (!(cond_ < 1e12)) {
        throw IllConditioned("layer operator condition estimate " + std::to_string(cond_));
    }
}

std::vector<double> LayerOperator::solve_density(const BoundaryScalar& psi,
                                                 int refine_iters) const {
    if (psi.size() != mesh_->vertex_count()) throw Error("boundary data size mismatch");
    const int n = mesh_->vertex_count();
    Eigen::Map<const Eigen::VectorXd> rhs(psi.values.data(), psi.size());
    Eigen::VectorXd mu = lu_.solve(rhs);
    std::vector<double> density(mu.data(), mu.data() + mu.size());

    for (int it = 0; it < refine_iters; ++it) {
        Eigen::VectorXd resid(n);
        for (int v = 0; v < n; ++v) {
            double h = mesh_->local_spacing[v];
            const Vec3& nrm = mesh_->vertex_normals[v];
            double t1 = evaluate(density, mesh_->vertices[v] - (h / 8.0) * nrm);
            double t2 = evaluate(density, mesh_->vertices[v] - (h / 4.0) * nrm);
            resid[v] = psi[v] - (2.0 * t1 - t2);
        }
        Eigen::VectorXd delta = lu_.solve(resid);
        for (int v = 0; v < n; ++v) density[v] += delta[v];
    }
    return density;
}

double LayerOperator::evaluate(const std::vector<double>& density, const Vec3& point) const {
    double mu_star = density[nearest_vertex(point)];
    double acc = 0.0;
    for (int f = 0; f < mesh_->face_count(); ++f) {
        const auto& t = mesh_->faces[f];
        face_dl_quadrature(point, mesh_->face_normal(f), mesh_->vertices[t[0]],
                           mesh_->vertices[t[1]], mesh_->vertices[t[2]],
                           density[t[0]] - mu_star, density[t[1]] - mu_star,
                           density[t[2]] - mu_star, acc, 0);
    }
    // the subtracted constant mode is restored through the exact interior
    // Gauss identity (double layer of density 1 is -1 inside)
    return acc - mu_star;
}

double LayerOperator::evaluate_fast(const std::vector<double>& density,
                                    const Vec3& point) const {
    const int n = mesh_->vertex_count();
    double acc_mu = 0.0, acc_one = 0.0;
    double best_d2 = std::numeric_limits<double>::max();
    int nearest = 0;
    for (int j = 0; j < n; ++j) {
        const Vec3& y = mesh_->vertices[j];
        double d2 = (point - y).squaredNorm();
        if (d2 < best_d2) { best_d2 = d2; nearest = j; }
        double k = double_layer_kernel(point, y, mesh_->vertex_normals[j]) *
                   mesh_->vertex_areas[j];
        acc_mu += k * density[j];
        acc_one += k;
    }
    double mu_star = density[nearest];
    return acc_mu - mu_star * (acc_one + 1.0);
}

int LayerOperator::nearest_vertex(const Vec3& point) const {
    double best_d2 = std::numeric_limits<double>::max();
    int nearest = 0;
    for (int j = 0; j < mesh_->vertex_count(); ++j) {
        double d2 = (point - mesh_->vertices[j]).squaredNorm();
        if (d2 < best_d2) { best_d2 = d2; nearest = j; }
    }
    return nearest;
}

std::pair<double, double> LayerOperator::nearest_vertex_gap(const Vec3& point) const {
    int v = nearest_vertex(point);
    return {(point - mesh_->vertices[v]).norm(), mesh_->local_spacing[v]};
}

LayerOperator assemble(const SurfaceMesh& mesh) { return LayerOperator(mesh); }

std::vector<double> harmonic_extension(const LayerOperator& op,
                                       const BoundaryScalar& psi,
                                       const std::vector<Vec3>& points) {
    for (const Vec3& p : points) {
        auto [gap, h] = op.nearest_vertex_gap(p);
        if (gap < h) {
            throw PointTooClose("evaluation point within one mesh spacing of the boundary");
        }
    }
    std::vector<double> density = op.solve_density(psi, 2);
    std::vector<double> out(points.size());
    for (size_t i = 0; i < points.size(); ++i) out[i] = op.evaluate(density, points[i]);
    return out;
}

BoundaryScalar dtn(const LayerOperator& op, const BoundaryScalar& psi) {
    const SurfaceMesh& mesh = op.mesh();
    std::vector<double> density = op.solve_density(psi);
    BoundaryScalar out = BoundaryScalar::zeros(mesh);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        double h = mesh.local_spacing[v];
        const Vec3& x = mesh.vertices[v];
        const Vec3& n = mesh.vertex_normals[v];
        double u1 = op.evaluate(density, x - h * n);
        double u2 = op.evaluate(density, x - 2.0 * h * n);
        double d1 = (psi[v] - u1) / h;
        double d2 = (psi[v] - u2) / (2.0 * h);
        out[v] = 2.0 * d1 - d2;  // Richardson: removes the O(h) term
    }
    return out;
}

double greens_function(const LayerOperator& op, const Vec3& x, const Vec3& y) {
    double sep = (x - y).norm();
    if (sep < 1e-12) throw CoincidentPoints("Green's function arguments coincide");
    const SurfaceMesh& mesh = op.mesh();
    BoundaryScalar trace = BoundaryScalar::zeros(mesh);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        trace[v] = 1.0 / (kFourPi * (mesh.vertices[v] - y).norm());
    }
    std::vector<double> density = op.solve_density(trace);
    double corrector = op.evaluate(density, x);
    return 1.0 / (kFourPi * sep) - corrector;
}

double ball_green_oracle(double radius, const Vec3& x, const Vec3& y) {
    if (x.norm() >= radius || y.norm() >= radius) {
        throw OutsideBall("ball Green oracle arguments must lie inside the ball");
    }
    double sep = (x - y).norm();
    if (sep < 1e-12) throw CoincidentPoints("ball Green oracle arguments coincide");
    double ynorm = y.norm();
    if (ynorm < 1e-14) {
        // image point at infinity; the corrector degenerates to 1/(4 pi R)
        return (1.0 / sep - 1.0 / radius) / kFourPi;
    }
    Vec3 image = (radius * radius / (ynorm * ynorm)) * y;
    double image_term = radius / (ynorm * (x - image).norm());
    return (1.0 / sep - image_term) / kFourPi;
}

std::pair<double, double> bernstein_gap(const LayerOperator& op,
                                        const BoundaryScalar& psi,
                                        const std::vector<Vec3>& interior_samples) {
    const SurfaceMesh& mesh = op.mesh();
    std::vector<double> density = op.solve_density(psi);

    double interior_sup = 0.0;
    for (const Vec3& p : interior_samples) {
        auto [gap, h] = op.nearest_vertex_gap(p);
        if (gap < h) throw PointTooClose("bernstein sample too close to the boundary");
        double s = 0.5 * h;
        Vec3 g;
        for (int a = 0; a < 3; ++a) {
            Vec3 e = Vec3::Zero();
            e[a] = s;
            g[a] = (op.evaluate(density, p + e) - op.evaluate(density, p - e)) / (2.0 * s);
        }
        interior_sup = std::max(interior_sup, g.norm());
    }

    BoundaryScalar normal_deriv = dtn(op, psi);
    std::vector<Vec3> tang = tangential_gradient(mesh, psi.values);
    double boundary_sup = 0.0;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        double full = std::sqrt(tang[v].squaredNorm() + normal_deriv[v] * normal_deriv[v]);
        boundary_sup = std::max(boundary_sup, full);
    }
    return {interior_sup, boundary_sup};
}

} // namespace fbeuler
