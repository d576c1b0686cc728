#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fbeuler/surface_mesh.hpp"

namespace fbeuler {

/// Per-vertex scalar boundary data bound to a mesh.
struct BoundaryScalar {
    const SurfaceMesh* mesh = nullptr;
    std::vector<double> values;

    BoundaryScalar() = default;
    BoundaryScalar(const SurfaceMesh& m, std::vector<double> v)
        : mesh(&m), values(std::move(v)) {
        if (values.size() != m.vertices.size()) {
            throw Error("BoundaryScalar length does not match vertex count");
        }
    }
    static BoundaryScalar zeros(const SurfaceMesh& m) {
        return BoundaryScalar(m, std::vector<double>(m.vertices.size(), 0.0));
    }
    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }
};

/// Dense collocation operator for the interior Dirichlet problem using the
/// double-layer kernel d/dN_y (1 / 4 pi |x - y|). The singular self-terms are
/// completed by the solid-angle identity: off-diagonal row sums fix the
/// diagonal so the principal-value operator maps density 1 to -1/2 on the
/// surface; the full interior-limit operator then maps density 1 to -1.
class LayerOperator {
public:
    explicit LayerOperator(const SurfaceMesh& mesh);

    const SurfaceMesh& mesh() const { return *mesh_; }
    double condition_estimate() const { return cond_; }

    /// Solves the second-kind boundary equation for the double-layer density
    /// whose interior potential has trace psi. refine_iters > 0 runs defect
    /// correction against the Richardson-extrapolated interior-limit trace,
    /// reusing the factorization; each pass costs two accurate evaluations
    /// per vertex and sharpens the trace residual by orders of magnitude.
    std::vector<double> solve_density(const BoundaryScalar& psi,
                                      int refine_iters = 0) const;

    /// Evaluates the double-layer potential of a density at a strictly
    /// interior point: per-face Gauss quadrature with near-field subdivision
    /// and Gauss-identity subtraction of the constant mode.
    double evaluate(const std::vector<double>& density, const Vec3& point) const;

    /// Vertex-rule evaluation, an order of magnitude cheaper; used for bulk
    /// grid sampling where percent-level accuracy suffices.
    double evaluate_fast(const std::vector<double>& density, const Vec3& point) const;

    int nearest_vertex(const Vec3& point) const;

    /// Distance from a point to the nearest vertex and that vertex's local
    /// mesh spacing (used for proximity guards).
    std::pair<double, double> nearest_vertex_gap(const Vec3& point) const;

private:
    const SurfaceMesh* mesh_;
    Eigen::MatrixXd system_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double cond_ = 0.0;
};

/// Builds the collocation operator; requires >= 162 vertices. Throws
/// IllConditioned if the estimated condition number exceeds 1e12.
LayerOperator assemble(const SurfaceMesh& mesh);

/// Values of the harmonic function with boundary trace psi at strictly
/// interior points. Throws PointTooClose within one local mesh spacing of
/// the boundary.
std::vector<double> harmonic_extension(const LayerOperator& op,
                                       const BoundaryScalar& psi,
                                       const std::vector<Vec3>& points);

/// Dirichlet-to-Neumann map: outward normal derivative of the harmonic
/// extension, by offset differencing along -N at {h, 2h} with Richardson
/// extrapolation (h = local mesh spacing).
BoundaryScalar dtn(const LayerOperator& op, const BoundaryScalar& psi);

/// Interior Green's function G(x,y) = 1/(4 pi |x-y|) - H(x,y), with H the
/// harmonic corrector matching the fundamental solution on the boundary.
double greens_function(const LayerOperator& op, const Vec3& x, const Vec3& y);

/// Closed-form image Green's function of the ball of radius R.
double ball_green_oracle(double radius, const Vec3& x, const Vec3& y);

/// (interior sup of |grad psi_H| over samples, boundary sup of the full
/// gradient |(tangential grad psi, dtn psi)|).
std::pair<double, double> bernstein_gap(const LayerOperator& op,
                                        const BoundaryScalar& psi,
                                        const std::vector<Vec3>& interior_samples);

} // namespace fbeuler
