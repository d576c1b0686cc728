#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fbeuler/sampling.hpp"

namespace fbeuler {

/// Scalar grid field over an InteriorSampling. Values live on interior cells
/// plus (after extrapolation) the outside part of the boundary band; the
/// validity mask tracks where values are meaningful.
struct ScalarField3 {
    const InteriorSampling* grid = nullptr;
    std::vector<double> v;
    std::vector<std::uint8_t> valid;

    explicit ScalarField3(const InteriorSampling& g)
        : grid(&g), v(g.total_cells(), 0.0), valid(g.total_cells(), 0) {}
    ScalarField3() = default;
};

struct VectorField3 {
    const InteriorSampling* grid = nullptr;
    std::vector<Vec3> v;
    std::vector<std::uint8_t> valid;

    explicit VectorField3(const InteriorSampling& g)
        : grid(&g), v(g.total_cells(), Vec3::Zero()), valid(g.total_cells(), 0) {}
    VectorField3() = default;
};

/// Samples an analytic function on every cell (valid everywhere).
ScalarField3 sample_scalar(const InteriorSampling& g,
                           const std::function<double(const Vec3&)>& f);
VectorField3 sample_vector(const InteriorSampling& g,
                           const std::function<Vec3(const Vec3&)>& f);

/// Trilinear interpolation; falls back to the nearest valid cell when the
/// 8-corner stencil is incomplete. Returns false only if nothing valid is
/// nearby.
bool interpolate(const ScalarField3& f, const Vec3& p, double& out);
bool interpolate(const VectorField3& f, const Vec3& p, Vec3& out);

/// Fills the outside half of the boundary band by linear extrapolation along
/// the nearest-boundary direction. When boundary values are supplied the
/// extrapolation passes through them at the interface.
void extrapolate_band(ScalarField3& f,
                      const std::function<double(const Vec3&)>& boundary_value = nullptr);
void extrapolate_band(VectorField3& f);

// --- difference operators ----------------------------------------------------

/// Centered second-order differences, one-sided (second-order) near the band.
VectorField3 gradient(const ScalarField3& f);
ScalarField3 divergence(const VectorField3& f);
VectorField3 curl(const VectorField3& f);
VectorField3 vector_laplacian(const VectorField3& f);

/// (grad u)_ij = d u_j / d x_i per cell, row-major 3x3.
struct MatrixField3 {
    const InteriorSampling* grid = nullptr;
    std::vector<Mat3> v;
    std::vector<std::uint8_t> valid;
};
MatrixField3 vector_gradient(const VectorField3& f);
MatrixField3 hessian(const ScalarField3& f);
bool interpolate(const MatrixField3& f, const Vec3& p, Mat3& out);

/// Rank-r derivative tensor of a scalar (3^rank components per cell,
/// index order: component = sum_k a_k 3^(rank-1-k) for derivative axes a_k).
struct TensorGridField {
    const InteriorSampling* grid = nullptr;
    int rank = 0;
    std::vector<std::vector<double>> comp;  // [3^rank][cells]
    std::vector<std::uint8_t> valid;
};
TensorGridField tensor_from_scalar(const ScalarField3& f);
TensorGridField tensor_derivative(const TensorGridField& t);

/// L2 norm over the fluid volume with smoothed cut-cell weights.
double l2_norm(const ScalarField3& f);
double l2_norm(const VectorField3& f);

} // namespace fbeuler
