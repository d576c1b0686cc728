#include "fbeuler/flow_state.hpp"

#include <cmath>

namespace fbeuler {

double divergence_sup(const FlowState& state) {
    ScalarField3 div = divergence(state.u);
    const InteriorSampling& g = *state.sampling;
    double sup = 0.0;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (div.valid[idx] && g.is_solver(idx)) sup = std::max(sup, std::abs(div.v[idx]));
    }
    return sup;
}

std::vector<double> normal_derivative_at_vertices(const SurfaceMesh& mesh,
                                                  const ScalarField3& f,
                                                  double boundary_value) {
    // linear extrapolation of deep gradient probes beats one-sided value
    // differencing: no 1/h amplification of interpolation noise, and it is
    // exact for quadratic fields
    (void)boundary_value;
    const InteriorSampling& g = *f.grid;
    const double h = g.h;
    ScalarField3 f_int = f;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!g.is_solver(idx)) f_int.valid[idx] = 0;
    }
    VectorField3 grad_f = gradient(f_int);
    std::vector<double> out(mesh.vertex_count(), 0.0);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const Vec3& x = mesh.vertices[v];
        const Vec3& n = mesh.vertex_normals[v];
        // probe depths sit well below the cut-cell error layer (the
        // resolution guard keeps iota0 >= 5h, so 5h stays interior)
        Vec3 g1, g2;
        interpolate(grad_f, x - 3.0 * h * n, g1);
        interpolate(grad_f, x - 5.0 * h * n, g2);
        out[v] = n.dot(2.5 * g1 - 1.5 * g2);
    }
    return out;
}

ScalarField3 pressure_solve(const FlowState& state) {
    const InteriorSampling& g = *state.sampling;
    MatrixField3 gu = vector_gradient(state.u);
    ScalarField3 source(g);
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!gu.valid[idx]) continue;
        const Mat3& a = gu.v[idx];  // a(i,j) = d_i u_j
        source.v[idx] = -(a * a).trace();
        source.valid[idx] = 1;
    }
    return poisson_dirichlet(g, source);
}

MaterialPressure material_pressure_solve(const FlowState& state, const ScalarField3& p) {
    const InteriorSampling& g = *state.sampling;
    MatrixField3 gu = vector_gradient(state.u);
    // second derivatives of extrapolated band values are unreliable; work
    // from the interior values only and fill the band afterwards
    ScalarField3 p_int = p;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!g.is_solver(idx)) p_int.valid[idx] = 0;
    }
    MatrixField3 hp = hessian(p_int);
    VectorField3 gp = gradient(p_int);
    VectorField3 lap_u = vector_laplacian(state.u);

    ScalarField3 source(g);
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!(gu.valid[idx] && hp.valid[idx] && gp.valid[idx] && lap_u.valid[idx])) continue;
        const Mat3& a = gu.v[idx];
        double p1 = 4.0 * a.cwiseProduct(hp.v[idx]).sum();
        double p2 = 2.0 * (a * a * a).trace();
        double p3 = -lap_u.v[idx].dot(gp.v[idx]);
        source.v[idx] = p1 + p2 + p3;
        source.valid[idx] = 1;
    }
    // near-band cells can lack the wide stencils; fill from inside so the
    // solve sees a complete source
    extrapolate_band(source);
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!source.valid[idx] && g.is_solver(idx)) {
            double v = 0.0;
            interpolate(source, g.center(idx), v);
            source.v[idx] = v;
            source.valid[idx] = 1;
        }
    }

    MaterialPressure out{poisson_dirichlet(g, source), {}, std::move(source)};
    out.grad_n_dtp = normal_derivative_at_vertices(*state.mesh, out.dtp, 0.0);
    return out;
}

VelocitySplit velocity_split(const FlowState& state, const LayerOperator& op) {
    const InteriorSampling& g = *state.sampling;
    const SurfaceMesh& mesh = *state.mesh;

    VectorField3 curl_omega = curl(state.omega);
    // component-wise zero-boundary Poisson solves for the vorticity part;
    // for divergence-free u the identity lap u = -curl(curl u) fixes the
    // source sign so that u = u0 + u1 actually holds
    VelocitySplit split;
    split.u0 = VectorField3(g);
    split.u1 = VectorField3(g);
    for (int c = 0; c < 3; ++c) {
        ScalarField3 src(g);
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (curl_omega.valid[idx]) {
                src.v[idx] = -curl_omega.v[idx][c];
                src.valid[idx] = 1;
            } else if (g.is_solver(idx)) {
                src.valid[idx] = 0;
            }
        }
        // complete missing near-band sources from inside values
        extrapolate_band(src);
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (!src.valid[idx] && g.is_solver(idx)) {
                double v = 0.0;
                interpolate(src, g.center(idx), v);
                src.v[idx] = v;
                src.valid[idx] = 1;
            }
        }
        ScalarField3 comp = poisson_dirichlet(g, src);
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (comp.valid[idx]) split.u0.v[idx][c] = comp.v[idx];
        }
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            split.u0.valid[idx] = comp.valid[idx];
        }
    }

    // harmonic part: component-wise extension of the boundary velocity
    std::array<std::vector<double>, 3> densities;
    for (int c = 0; c < 3; ++c) {
        BoundaryScalar trace = BoundaryScalar::zeros(mesh);
        for (int v = 0; v < mesh.vertex_count(); ++v) trace[v] = state.U[v][c];
        densities[c] = op.solve_density(trace);
    }
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!g.is_solver(idx)) continue;
        Vec3 val;
        for (int c = 0; c < 3; ++c) val[c] = op.evaluate_fast(densities[c], g.center(idx));
        split.u1.v[idx] = val;
        split.u1.valid[idx] = 1;
    }
    extrapolate_band(split.u1);

    double num = 0.0, den = 0.0;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!(g.is_solver(idx) && state.u.valid[idx] && split.u0.valid[idx] &&
              split.u1.valid[idx])) {
            continue;
        }
        double w = g.cell_weight(idx);
        num += w * (state.u.v[idx] - split.u0.v[idx] - split.u1.v[idx]).squaredNorm();
        den += w * state.u.v[idx].squaredNorm();
    }
    split.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return split;
}

} // namespace fbeuler
