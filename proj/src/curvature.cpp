#include "fbeuler/curvature.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace fbeuler {

CurvatureData second_fundamental_form(const SurfaceMesh& mesh) {
    const int nv = mesh.vertex_count();
    if (nv < 162) {
        throw InsufficientNeighborhood(
            "mesh has " + std::to_string(nv) +
            " vertices; curvature estimation requires at least 162");
    }

    CurvatureData out;
    out.theta.resize(nv);
    out.principal.resize(nv);
    out.fitted_normals.resize(nv);
    out.theta_sup = 0.0;

    for (int v = 0; v < nv; ++v) {
        std::vector<int> ring = mesh.two_ring(v);
        if (ring.size() < 5) {
            throw InsufficientNeighborhood("vertex " + std::to_string(v) +
                                           " has fewer than 5 two-ring neighbors");
        }
        auto [t1, t2] = mesh.tangent_frame(v);
        const Vec3& n = mesh.vertex_normals[v];

        // normalize local coordinates by the mean offset so the normal
        // equations are scale-invariant (exact scaling equivariance)
        double scale = 0.0;
        for (int w : ring) scale += (mesh.vertices[w] - mesh.vertices[v]).norm();
        scale /= ring.size();

        // height fit zeta = b1 xi + b2 eta + (a20 xi^2 + 2 a11 xi eta + a02 eta^2)/2
        Eigen::Matrix<double, 5, 5> ata = Eigen::Matrix<double, 5, 5>::Zero();
        Eigen::Matrix<double, 5, 1> atb = Eigen::Matrix<double, 5, 1>::Zero();
        for (int w : ring) {
            Vec3 d = (mesh.vertices[w] - mesh.vertices[v]) / scale;
            double xi = d.dot(t1), eta = d.dot(t2), zeta = d.dot(n);
            Eigen::Matrix<double, 5, 1> row;
            row << xi, eta, 0.5 * xi * xi, xi * eta, 0.5 * eta * eta;
            ata += row * row.transpose();
            atb += row * zeta;
        }
        Eigen::Matrix<double, 5, 1> coef = ata.ldlt().solve(atb);

        // the linear fit terms estimate the tilt of the averaged vertex
        // normal against the underlying surface; the corrected normal is
        // accurate to O(h^2) even at irregular vertices
        out.fitted_normals[v] =
            (n - coef[0] * t1 - coef[1] * t2).normalized();

        // theta = -Hess(height) in the tangent frame; outward-normal sphere
        // of radius R then carries kappa = +1/R
        Eigen::Matrix2d theta;
        theta << -coef[2], -coef[3], -coef[3], -coef[4];
        theta /= scale;

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(theta);
        double k1 = es.eigenvalues()[0], k2 = es.eigenvalues()[1];
        out.theta[v] = theta;
        out.principal[v] = {k1, k2};
        out.theta_sup = std::max(out.theta_sup, std::sqrt(k1 * k1 + k2 * k2));
    }
    return out;
}

double injectivity_radius(const SurfaceMesh& mesh, const CurvatureData& curv, double cap) {
    const int nv = mesh.vertex_count();
    double best = cap;

    for (int v = 0; v < nv; ++v) {
        double kmax = std::max(std::abs(curv.principal[v].first),
                               std::abs(curv.principal[v].second));
        if (kmax > 0.0) best = std::min(best, 1.0 / kmax);
    }

    // reach proxy over vertex pairs, excluding the 2-ring of x; the
    // quadric-corrected normals avoid the O(h) tilt of averaged normals at
    // irregular vertices, which otherwise biases nearby pairs
    std::vector<std::vector<int>> rings(nv);
    for (int v = 0; v < nv; ++v) rings[v] = mesh.two_ring(v);
    for (int v = 0; v < nv; ++v) {
        const Vec3& x = mesh.vertices[v];
        const Vec3& n = curv.fitted_normals[v];
        const auto& excl = rings[v];
        for (int w = 0; w < nv; ++w) {
            if (w == v) continue;
            if (std::binary_search(excl.begin(), excl.end(), w)) continue;
            Vec3 d = x - mesh.vertices[w];
            double denom = 2.0 * std::abs(d.dot(n));
            if (denom < 1e-300) continue;
            best = std::min(best, d.squaredNorm() / denom);
        }
    }
    return std::min(best, cap);
}

double injectivity_radius(const SurfaceMesh& mesh, double cap) {
    return injectivity_radius(mesh, second_fundamental_form(mesh), cap);
}

namespace {

// every vertex admits an empty exterior ball of radius r
bool exterior_balls_empty(const SurfaceMesh& mesh, double r) {
    const int nv = mesh.vertex_count();
    const double r2 = r * r * (1.0 - 1e-12);
    for (int v = 0; v < nv; ++v) {
        Vec3 c = mesh.vertices[v] + r * mesh.vertex_normals[v];
        for (int w = 0; w < nv; ++w) {
            if (w == v) continue;
            if ((mesh.vertices[w] - c).squaredNorm() < r2) return false;
        }
    }
    return true;
}

} // namespace

double exterior_sphere_radius(const SurfaceMesh& mesh, double r_max) {
    if (exterior_balls_empty(mesh, r_max)) return r_max;
    double lo = 0.0, hi = r_max;
    while (hi - lo > 1e-3 * r_max) {
        double mid = 0.5 * (lo + hi);
        if (exterior_balls_empty(mesh, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

GeometryBounds geometry_bounds(const SurfaceMesh& mesh, double cap) {
    CurvatureData curv = second_fundamental_form(mesh);
    GeometryBounds b;
    b.iota0 = injectivity_radius(mesh, curv, cap);
    b.r_exterior = exterior_sphere_radius(mesh, cap);
    b.K_geom = curv.theta_sup + 1.0 / b.iota0;
    return b;
}

} // namespace fbeuler
