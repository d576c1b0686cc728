#include "fbeuler/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fbeuler/polynomial.hpp"
#include "fbeuler/spherical_harmonics.hpp"

namespace fbeuler {

namespace {

// extended projection Pi(x) = I - phi(dist) N N^T with the smoothstep cutoff
// reaching zero at iota0/2
struct ExtendedProjection {
    const InteriorSampling* grid;
    double iota0;

    Mat3 at(int idx) const {
        double dist = std::abs(grid->sdist[idx]);
        double quarter = 0.25 * iota0;
        double phi;
        if (dist <= quarter) {
            phi = 1.0;
        } else if (dist >= 2.0 * quarter) {
            phi = 0.0;
        } else {
            double s = (dist - quarter) / quarter;
            phi = 1.0 - (3.0 * s * s - 2.0 * s * s * s);
        }
        if (phi == 0.0) return Mat3::Identity();
        Vec3 x = grid->center(idx);
        Vec3 d = x - grid->nearest_point[idx];
        double len = d.norm();
        if (len < 1e-14) return Mat3::Identity();
        Vec3 n = d / len * (grid->sdist[idx] >= 0.0 ? 1.0 : -1.0);
        return Mat3::Identity() - phi * (n * n.transpose());
    }
};

// apply Pi to every index slot of a rank-k component stack at one cell
void project_all_indices(std::vector<double>& t, int rank, const Mat3& pi) {
    int total = 1;
    for (int r = 0; r < rank; ++r) total *= 3;
    std::vector<double> tmp(total);
    for (int m = 0; m < rank; ++m) {
        // transform index slot m (stride pattern depends on slot position)
        int outer = 1;
        for (int r = 0; r < m; ++r) outer *= 3;
        int inner = total / (outer * 3);
        for (int o = 0; o < outer; ++o) {
            for (int in = 0; in < inner; ++in) {
                double a0 = t[(o * 3 + 0) * inner + in];
                double a1 = t[(o * 3 + 1) * inner + in];
                double a2 = t[(o * 3 + 2) * inner + in];
                for (int b = 0; b < 3; ++b) {
                    tmp[(o * 3 + b) * inner + in] =
                        pi(b, 0) * a0 + pi(b, 1) * a1 + pi(b, 2) * a2;
                }
            }
        }
        t = tmp;
    }
}

std::vector<TensorGridField> derivative_stack(const ScalarField3& f, int max_rank) {
    std::vector<TensorGridField> out;
    out.push_back(tensor_from_scalar(f));
    for (int r = 1; r <= max_rank; ++r) out.push_back(tensor_derivative(out.back()));
    return out;
}

ScalarField3 component_field(const VectorField3& u, int c) {
    ScalarField3 f(*u.grid);
    f.v.resize(u.v.size());
    for (size_t i = 0; i < u.v.size(); ++i) f.v[i] = u.v[i][c];
    f.valid = u.valid;
    return f;
}

// gather tensor components at a boundary vertex by linear extrapolation of
// deep interior probes (depths 1.5h and 2.5h, clear of one-sided stencils)
bool probe_tensor_at_vertex(const TensorGridField& t, const Vec3& x, const Vec3& n,
                            std::vector<double>& out) {
    const InteriorSampling& g = *t.grid;
    double h = g.h;
    size_t nc = t.comp.size();
    out.assign(nc, 0.0);
    ScalarField3 tmp(g);
    tmp.valid = t.valid;
    for (size_t c = 0; c < nc; ++c) {
        tmp.v = t.comp[c];
        double f1 = 0.0, f2 = 0.0;
        bool ok1 = interpolate(tmp, x - 1.5 * h * n, f1);
        bool ok2 = interpolate(tmp, x - 2.5 * h * n, f2);
        if (!ok1 || !ok2) return false;
        out[c] = 2.5 * f1 - 1.5 * f2;
    }
    return true;
}

double sup_grad_u_boundary(const FlowState& state) {
    const SurfaceMesh& mesh = *state.mesh;
    const double h = state.sampling->h;
    std::array<std::vector<double>, 3> comps;
    std::array<std::vector<Vec3>, 3> tang;
    for (int c = 0; c < 3; ++c) {
        comps[c].resize(mesh.vertex_count());
        for (int v = 0; v < mesh.vertex_count(); ++v) comps[c][v] = state.U[v][c];
        tang[c] = tangential_gradient(mesh, comps[c]);
    }
    double sup = 0.0;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const Vec3& x = mesh.vertices[v];
        const Vec3& n = mesh.vertex_normals[v];
        auto [t1, t2] = mesh.tangent_frame(v);
        Vec3 du_t1, du_t2, du_n;
        for (int c = 0; c < 3; ++c) {
            du_t1[c] = tang[c][v].dot(t1);
            du_t2[c] = tang[c][v].dot(t2);
            Vec3 u1, u2;
            interpolate(state.u, x - h * n, u1);
            interpolate(state.u, x - 2.0 * h * n, u2);
            du_n[c] = (3.0 * state.U[v][c] - 4.0 * u1[c] + u2[c]) / (2.0 * h);
        }
        Mat3 grad_u = t1 * du_t1.transpose() + t2 * du_t2.transpose() + n * du_n.transpose();
        sup = std::max(sup, grad_u.norm());  // Frobenius
    }
    return sup;
}

double omega_sup(const FlowState& state) {
    const InteriorSampling& g = *state.sampling;
    double sup = 0.0;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (g.is_solver(idx) && state.omega.valid[idx]) {
            sup = std::max(sup, state.omega.v[idx].norm());
        }
    }
    return sup;
}

} // namespace

double compute_A(const FlowState& state, const VelocitySplit& split,
                 const LayerOperator& op) {
    (void)split;
    const SurfaceMesh& mesh = *state.mesh;

    double dtn_sup = 0.0;
    {
        std::array<BoundaryScalar, 3> nu;
        for (int c = 0; c < 3; ++c) {
            BoundaryScalar trace = BoundaryScalar::zeros(mesh);
            for (int v = 0; v < mesh.vertex_count(); ++v) trace[v] = state.U[v][c];
            nu[c] = dtn(op, trace);
        }
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            Vec3 w(nu[0][v], nu[1][v], nu[2][v]);
            dtn_sup = std::max(dtn_sup, w.norm());
        }
    }
    return omega_sup(state) + sup_grad_u_boundary(state) + dtn_sup;
}

namespace {

double k_functional(const FlowState& state, const ScalarField3& p, bool clamp) {
    const SurfaceMesh& mesh = *state.mesh;
    CurvatureData curv = second_fundamental_form(mesh);
    double iota0 = injectivity_radius(mesh, curv, 1e6);
    std::vector<double> dnp = normal_derivative_at_vertices(mesh, p, 0.0);
    double min_abs = std::numeric_limits<double>::max();
    for (double v : dnp) min_abs = std::min(min_abs, std::abs(v));
    if (min_abs < 1e-12) {
        if (!clamp) {
            throw TaylorDegenerate("pressure normal derivative below 1e-12; K undefined");
        }
        min_abs = 1e-12;
    }
    return curv.theta_sup + 1.0 / iota0 + 1.0 / min_abs;
}

} // namespace

double compute_K(const FlowState& state, const ScalarField3& p) {
    return k_functional(state, p, false);
}

double compute_K_clamped(const FlowState& state, const ScalarField3& p) {
    return k_functional(state, p, true);
}

double taylor_sign_margin(const FlowState& state, const ScalarField3& p) {
    std::vector<double> dnp = normal_derivative_at_vertices(*state.mesh, p, 0.0);
    double margin = std::numeric_limits<double>::max();
    for (double v : dnp) margin = std::min(margin, -v);
    return margin;
}

std::array<EnergyTriple, 4> energy_functionals_all(const FlowState& state,
                                                   const ScalarField3& p,
                                                   bool clamp_taylor) {
    const InteriorSampling& g = *state.sampling;
    const SurfaceMesh& mesh = *state.mesh;
    const double cell_vol = g.h * g.h * g.h;
    std::array<EnergyTriple, 4> out{};

    // E_0 = int |u|^2; its boundary term vanishes since p = 0 on the surface
    {
        double e = 0.0;
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (!state.u.valid[idx]) continue;
            double w = g.cell_weight(idx);
            if (w > 0.0) e += w * state.u.v[idx].squaredNorm();
        }
        out[0].E = e * cell_vol;
        out[0].cE = out[0].E;
    }

    ExtendedProjection proj{&g, g.iota0_estimate};

    std::array<std::vector<TensorGridField>, 3> u_stacks, w_stacks;
    for (int c = 0; c < 3; ++c) {
        u_stacks[c] = derivative_stack(component_field(state.u, c), 3);
        w_stacks[c] = derivative_stack(component_field(state.omega, c), 2);
    }
    ScalarField3 p_int = p;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!g.is_solver(idx)) p_int.valid[idx] = 0;
    }
    std::vector<TensorGridField> p_stack = derivative_stack(p_int, 3);
    std::vector<double> dnp = normal_derivative_at_vertices(mesh, p, 0.0);

    for (int r = 1; r <= 3; ++r) {
        // interior term: sum_c |Pi grad^r u_c|^2
        double e = 0.0;
        std::vector<double> t;
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            double w = g.cell_weight(idx);
            if (w <= 0.0) continue;
            if (!(u_stacks[0][r].valid[idx] && u_stacks[1][r].valid[idx] &&
                  u_stacks[2][r].valid[idx])) {
                continue;
            }
            Mat3 pi = proj.at(idx);
            double cellsum = 0.0;
            for (int c = 0; c < 3; ++c) {
                size_t nc = u_stacks[c][r].comp.size();
                t.resize(nc);
                for (size_t q = 0; q < nc; ++q) t[q] = u_stacks[c][r].comp[q][idx];
                project_all_indices(t, r, pi);
                for (double v : t) cellsum += v * v;
            }
            e += w * cellsum;
        }
        out[r].E = e * cell_vol;

        // boundary term: |Pi grad^r p|^2 / |grad p|
        double eb = 0.0;
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            double weight_denom = std::abs(dnp[v]);
            if (weight_denom < 1e-12) {
                if (!clamp_taylor) {
                    throw TaylorDegenerate("boundary energy weight 1/|grad p| diverges");
                }
                weight_denom = 1e-12;
            }
            if (!probe_tensor_at_vertex(p_stack[r], mesh.vertices[v], mesh.vertex_normals[v],
                                        t)) {
                continue;
            }
            Mat3 pi = Mat3::Identity() -
                      mesh.vertex_normals[v] * mesh.vertex_normals[v].transpose();
            project_all_indices(t, r, pi);
            double sq = 0.0;
            for (double val : t) sq += val * val;
            eb += mesh.vertex_areas[v] * sq / weight_denom;
        }
        out[r].E += eb;

        // K_r = int |grad^(r-1) omega|^2
        double ke = 0.0;
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            double w = g.cell_weight(idx);
            if (w <= 0.0) continue;
            if (!(w_stacks[0][r - 1].valid[idx] && w_stacks[1][r - 1].valid[idx] &&
                  w_stacks[2][r - 1].valid[idx])) {
                continue;
            }
            double cellsum = 0.0;
            for (int c = 0; c < 3; ++c) {
                for (const auto& comp : w_stacks[c][r - 1].comp) {
                    cellsum += comp[idx] * comp[idx];
                }
            }
            ke += w * cellsum;
        }
        out[r].K = ke * cell_vol;
        out[r].cE = out[r].E + out[r].K;
    }
    return out;
}

EnergyTriple energy_functionals(const FlowState& state, const ScalarField3& p, int r,
                                bool clamp_taylor) {
    if (r < 0 || r > 3) throw Error("energy order r must be in 0..3");
    return energy_functionals_all(state, p, clamp_taylor)[r];
}

double breakdown_integral(const std::vector<DiagnosticsRecord>& records) {
    if (records.size() < 2) throw UnsortedRecords("need at least 2 records");
    for (size_t i = 1; i < records.size(); ++i) {
        if (!(records[i].t > records[i - 1].t)) {
            throw UnsortedRecords("record times must be strictly increasing");
        }
    }
    double integral = 0.0;
    for (size_t i = 1; i < records.size(); ++i) {
        double f0 = records[i - 1].A * records[i - 1].A + records[i - 1].grad_n_dtp_sup;
        double f1 = records[i].A * records[i].A + records[i].grad_n_dtp_sup;
        integral += 0.5 * (f0 + f1) * (records[i].t - records[i - 1].t);
    }
    return integral;
}

BkmCheck bkm_log_check(const FlowState& state, const VelocitySplit& split) {
    const InteriorSampling& g = *state.sampling;

    BkmCheck out;
    MatrixField3 gu0 = vector_gradient(split.u0);
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (gu0.valid[idx] && g.is_solver(idx)) {
            out.lhs = std::max(out.lhs, gu0.v[idx].norm());
        }
    }

    double w_sup = omega_sup(state);

    // discrete H2 norm: sum of L2 norms of derivatives up to order 2 over
    // cells at least two cells clear of the band
    double h2 = 0.0;
    {
        const double core = -4.0 * g.h;
        std::array<std::vector<TensorGridField>, 3> stacks;
        for (int c = 0; c < 3; ++c) {
            stacks[c] = derivative_stack(component_field(state.omega, c), 2);
        }
        for (int r = 0; r <= 2; ++r) {
            double sq = 0.0;
            for (int idx = 0; idx < g.total_cells(); ++idx) {
                if (g.sdist[idx] > core) continue;
                for (int c = 0; c < 3; ++c) {
                    if (!stacks[c][r].valid[idx]) continue;
                    for (const auto& comp : stacks[c][r].comp) sq += comp[idx] * comp[idx];
                }
            }
            h2 += std::sqrt(sq * g.h * g.h * g.h);
        }
    }

    double log_plus = h2 > 1.0 ? std::log(h2) : 0.0;
    out.rhs = (1.0 + log_plus) * w_sup + 1.0;
    out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
    return out;
}

double boundary_identity_residual(const FlowState& state, const ScalarField3& q) {
    const InteriorSampling& g = *state.sampling;
    const SurfaceMesh& mesh = *state.mesh;
    CurvatureData curv = second_fundamental_form(mesh);

    ScalarField3 q_int = q;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!g.is_solver(idx)) q_int.valid[idx] = 0;
    }
    MatrixField3 hq = hessian(q_int);
    std::vector<double> dnq = normal_derivative_at_vertices(mesh, q);

    double resid_sup = 0.0, scale_sup = 0.0;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const Vec3& x = mesh.vertices[v];
        const Vec3& n = mesh.vertex_normals[v];
        Mat3 h1, h2;
        bool ok1 = interpolate(hq, x - 1.5 * g.h * n, h1);
        bool ok2 = interpolate(hq, x - 2.5 * g.h * n, h2);
        if (!ok1 || !ok2) continue;
        Mat3 hv = 2.5 * h1 - 1.5 * h2;
        Mat3 pi = Mat3::Identity() - n * n.transpose();
        Mat3 lhs = pi * hv * pi;
        auto [t1, t2] = mesh.tangent_frame(v);
        Eigen::Matrix<double, 3, 2> frame;
        frame.col(0) = t1;
        frame.col(1) = t2;
        Mat3 rhs = frame * curv.theta[v] * frame.transpose() * dnq[v];
        resid_sup = std::max(resid_sup, (lhs - rhs).norm());
        scale_sup = std::max(scale_sup, rhs.norm());
    }
    return scale_sup > 0.0 ? resid_sup / scale_sup : 0.0;
}

InequalityReport inequality_suite(const FlowState& state, const ScalarField3& p,
                                  const LayerOperator& op) {
    const InteriorSampling& g = *state.sampling;
    const SurfaceMesh& mesh = *state.mesh;
    InequalityReport report;

    CurvatureData curv = second_fundamental_form(mesh);
    double iota0 = injectivity_radius(mesh, curv, 1e6);
    double K_geom = curv.theta_sup + 1.0 / iota0;
    double volume = mesh.signed_volume;
    ExtendedProjection proj{&g, iota0};

    // (a) pointwise |grad b| <= C (|div b| + |curl b| + |Pi grad b|)
    auto divcurl_entry = [&](const std::string& name, const VectorField3& beta) {
        MatrixField3 gb = vector_gradient(beta);
        double fitted = 0.0;
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (!gb.valid[idx] || !g.is_solver(idx)) continue;
            const Mat3& m = gb.v[idx];
            double div = m.trace();
            Vec3 cl(m(1, 2) - m(2, 1), m(2, 0) - m(0, 2), m(0, 1) - m(1, 0));
            Mat3 pi = proj.at(idx);
            // the lemma projects the derivative index only (rows of grad b)
            Mat3 projected = pi * m;
            double denom = std::abs(div) + cl.norm() + projected.norm();
            double num = m.norm();
            if (denom > 1e-12 * std::max(1.0, num)) {
                fitted = std::max(fitted, num / denom);
            }
        }
        InequalityEntry e;
        e.name = name;
        e.lhs = 0.0;
        e.rhs = 0.0;
        e.ratio = fitted;
        e.fitted_constant = fitted;
        report.entries.push_back(e);
    };
    divcurl_entry("divcurl_pointwise[u]", state.u);
    {
        Polynomial xyz({Monomial{1.0, 1, 1, 1}});
        PolyVectorField gradxyz = gradient_field(xyz);
        VectorField3 beta = sample_vector(g, [&](const Vec3& pt) { return gradxyz.eval(pt); });
        divcurl_entry("divcurl_pointwise[grad_xyz]", beta);
    }

    // (b) trace inequality ||b||^2_L2(bdry) <= C (||grad b||^2 + K ||b||^2)
    {
        std::vector<double> usq(mesh.vertex_count());
        for (int v = 0; v < mesh.vertex_count(); ++v) usq[v] = state.U[v].squaredNorm();
        double lhs = boundary_integral(mesh, usq);
        MatrixField3 gu = vector_gradient(state.u);
        double grad_sq = 0.0, u_sq = 0.0;
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            double w = g.cell_weight(idx);
            if (w <= 0.0) continue;
            if (gu.valid[idx]) grad_sq += w * gu.v[idx].squaredNorm();
            if (state.u.valid[idx]) u_sq += w * state.u.v[idx].squaredNorm();
        }
        grad_sq *= g.h * g.h * g.h;
        u_sq *= g.h * g.h * g.h;
        InequalityEntry e;
        e.name = "trace[u]";
        e.lhs = lhs;
        e.rhs = grad_sq + K_geom * u_sq;
        e.ratio = e.rhs > 0.0 ? e.lhs / e.rhs : 0.0;
        e.fitted_constant = e.ratio;
        report.entries.push_back(e);
    }

    // (c) Poincare pair for the zero-trace pressure
    {
        ScalarField3 p_int = p;
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (!g.is_solver(idx)) p_int.valid[idx] = 0;
        }
        VectorField3 gp = gradient(p_int);
        // laplacian p equals the assembled source by construction
        MatrixField3 gu = vector_gradient(state.u);
        ScalarField3 lap(g);
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (gu.valid[idx]) {
                lap.v[idx] = -(gu.v[idx] * gu.v[idx]).trace();
                lap.valid[idx] = 1;
            }
        }
        double np = l2_norm(p_int), ngp = l2_norm(gp), nlp = l2_norm(lap);
        InequalityEntry e1;
        e1.name = "poincare[p <= V^1/3 grad_p]";
        e1.lhs = np;
        e1.rhs = std::cbrt(volume) * ngp;
        e1.ratio = e1.rhs > 0.0 ? e1.lhs / e1.rhs : 0.0;
        e1.fitted_constant = e1.ratio;
        report.entries.push_back(e1);
        InequalityEntry e2;
        e2.name = "poincare[grad_p <= V^1/6 lap_p]";
        e2.lhs = ngp;
        e2.rhs = std::pow(volume, 1.0 / 6.0) * nlp;
        e2.ratio = e2.rhs > 0.0 ? e2.lhs / e2.rhs : 0.0;
        e2.fitted_constant = e2.ratio;
        report.entries.push_back(e2);
    }

    // (d) Bernstein maximum principle, gated at 5%
    {
        std::vector<Vec3> samples;
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (g.sdist[idx] < -2.5 * mesh.mean_edge_length) samples.push_back(g.center(idx));
            if (samples.size() >= 150) break;
        }
        int fails = 0, count = 0;
        double worst = 0.0;
        for (auto [l, m] : std::vector<std::pair<int, int>>{{1, 0}, {2, 1}, {3, -2}}) {
            BoundaryScalar psi = BoundaryScalar::zeros(mesh);
            for (int v = 0; v < mesh.vertex_count(); ++v) {
                psi[v] = solid_harmonic(l, m, mesh.vertices[v]);
            }
            auto [isup, bsup] = bernstein_gap(op, psi, samples);
            double ratio = bsup > 0.0 ? isup / bsup : 0.0;
            worst = std::max(worst, ratio);
            if (ratio > 1.05) ++fails;
            ++count;
        }
        InequalityEntry e;
        e.name = "bernstein[harmonic corpus]";
        e.lhs = worst;
        e.rhs = 1.05;
        e.ratio = worst;
        e.fitted_constant = worst;
        e.gated = true;
        e.pass = fails == 0;
        report.entries.push_back(e);
    }

    // (e) boundary identity Pi hess(q) Pi = theta grad_N q on the zero-trace
    // pressure
    {
        InequalityEntry e;
        e.name = "boundary_identity[p]";
        e.ratio = boundary_identity_residual(state, p);
        e.lhs = e.ratio;
        e.rhs = 1.0;
        e.fitted_constant = e.ratio;
        report.entries.push_back(e);
    }

    (void)op;
    return report;
}

DiagnosticsRecord compute_record(const FlowState& state, const LayerOperator& op) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    ScalarField3 p = pressure_solve(state);
    MaterialPressure mp = material_pressure_solve(state, p);
    VelocitySplit split = velocity_split(state, op);

    rec.A = compute_A(state, split, op);
    rec.K = compute_K_clamped(state, p);
    rec.taylor_margin = taylor_sign_margin(state, p);
    for (double v : mp.grad_n_dtp) {
        rec.grad_n_dtp_sup = std::max(rec.grad_n_dtp_sup, std::abs(v));
    }
    std::array<EnergyTriple, 4> energies = energy_functionals_all(state, p, true);
    for (int r = 0; r <= 3; ++r) {
        rec.E[r] = energies[r].E;
        rec.Kr[r] = energies[r].K;
        rec.cE[r] = energies[r].cE;
    }
    rec.volume = state.mesh->signed_volume;
    rec.split_residual = split.residual;
    BkmCheck bkm = bkm_log_check(state, split);
    rec.bkm_lhs = bkm.lhs;
    rec.bkm_rhs = bkm.rhs;
    return rec;
}

const char* kDiagnosticsCsvHeader =
    "t,A,K,taylor_margin,grad_n_dtp_sup,E0,E1,E2,E3,K1,K2,K3,cE0,cE1,cE2,cE3,"
    "volume,split_residual,bkm_lhs,bkm_rhs";

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& records) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << kDiagnosticsCsvHeader << "\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << (last ? "\n" : ",");
    };
    for (const auto& r : records) {
        put(r.t);
        put(r.A);
        put(r.K);
        put(r.taylor_margin);
        put(r.grad_n_dtp_sup);
        for (int i = 0; i < 4; ++i) put(r.E[i]);
        for (int i = 1; i < 4; ++i) put(r.Kr[i]);
        for (int i = 0; i < 4; ++i) put(r.cE[i]);
        put(r.volume);
        put(r.split_residual);
        put(r.bkm_lhs);
        put(r.bkm_rhs, true);
    }
    if (!os) throw IoError("write failed for " + path);
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw IoError(path + ": empty file (row 0)");
    if (line != kDiagnosticsCsvHeader) throw IoError(path + ": bad header (row 1)");
    std::vector<DiagnosticsRecord> out;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string item;
        std::vector<double> vals;
        while (std::getline(ss, item, ',')) {
            try {
                size_t pos = 0;
                vals.push_back(std::stod(item, &pos));
                if (pos != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw IoError(path + ": malformed value at row " + std::to_string(row));
            }
        }
        if (vals.size() != 20) {
            throw IoError(path + ": expected 20 columns at row " + std::to_string(row));
        }
        DiagnosticsRecord r;
        int c = 0;
        r.t = vals[c++];
        r.A = vals[c++];
        r.K = vals[c++];
        r.taylor_margin = vals[c++];
        r.grad_n_dtp_sup = vals[c++];
        for (int i = 0; i < 4; ++i) r.E[i] = vals[c++];
        for (int i = 1; i < 4; ++i) r.Kr[i] = vals[c++];
        for (int i = 0; i < 4; ++i) r.cE[i] = vals[c++];
        r.volume = vals[c++];
        r.split_residual = vals[c++];
        r.bkm_lhs = vals[c++];
        r.bkm_rhs = vals[c++];
        out.push_back(r);
    }
    return out;
}

} // namespace fbeuler
