#include "fbeuler/evolution.hpp"

#include <cmath>

namespace fbeuler {

VelocityModel make_velocity_model(const VelocitySpec& spec) {
    VelocityModel m;
    switch (spec.kind) {
        case VelocitySpec::Kind::Zero: {
            m.velocity = [](const Vec3&) { return Vec3::Zero(); };
            m.vorticity = [](const Vec3&) { return Vec3::Zero(); };
            break;
        }
        case VelocitySpec::Kind::RigidRotation: {
            Vec3 w = spec.rotation;
            m.velocity = [w](const Vec3& p) -> Vec3 { return w.cross(p); };
            Vec3 two_w = 2.0 * w;
            m.vorticity = [two_w](const Vec3&) { return two_w; };
            break;
        }
        case VelocitySpec::Kind::LinearStrain: {
            if (std::abs(spec.strain.trace()) > 1e-12) {
                throw ConfigError("strain matrix must be trace-free (incompressibility)");
            }
            Mat3 s = spec.strain;
            m.velocity = [s](const Vec3& p) -> Vec3 { return s * p; };
            // curl of a linear field: twice the axial vector of the
            // antisymmetric part
            Vec3 w(s(2, 1) - s(1, 2), s(0, 2) - s(2, 0), s(1, 0) - s(0, 1));
            m.vorticity = [w](const Vec3&) { return w; };
            break;
        }
        case VelocitySpec::Kind::HarmonicGradient: {
            if (!spec.potential.laplacian().is_zero(1e-12)) {
                throw ConfigError("velocity potential must be harmonic");
            }
            PolyVectorField grad = gradient_field(spec.potential);
            m.velocity = [grad](const Vec3& p) { return grad.eval(p); };
            m.vorticity = [](const Vec3&) { return Vec3::Zero(); };
            break;
        }
        case VelocitySpec::Kind::Dipole: {
            Vec3 mom = spec.dipole_moment;
            Vec3 y0 = spec.dipole_center;
            m.velocity = [mom, y0](const Vec3& p) -> Vec3 {
                Vec3 r = p - y0;
                double rn = r.norm();
                double r3 = rn * rn * rn;
                double r5 = r3 * rn * rn;
                return mom / r3 - 3.0 * mom.dot(r) * r / r5;
            };
            m.vorticity = [](const Vec3&) { return Vec3::Zero(); };
            break;
        }
        case VelocitySpec::Kind::Polynomial: {
            if (!spec.poly.divergence().is_zero(1e-12)) {
                throw ConfigError("polynomial velocity must be divergence-free");
            }
            PolyVectorField u = spec.poly;
            PolyVectorField w = u.curl();
            m.velocity = [u](const Vec3& p) { return u.eval(p); };
            m.vorticity = [w](const Vec3& p) { return w.eval(p); };
            break;
        }
    }
    return m;
}

SurfaceMesh make_surface(const SurfaceSpec& spec, int subdiv) {
    switch (spec.kind) {
        case SurfaceSpec::Kind::Sphere:
            return icosphere(subdiv, spec.radius);
        case SurfaceSpec::Kind::Ellipsoid:
            return ellipsoid(subdiv, spec.a, spec.b, spec.c);
        case SurfaceSpec::Kind::PerturbedSphere:
            return perturbed_sphere(subdiv, spec.radius, spec.bumps);
    }
    throw ConfigError("unknown surface kind");
}

FlowState init_scenario(const Scenario& s) {
    if (!(s.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(s.t_end >= s.dt)) throw ConfigError("t_end must be at least dt");

    FlowState state;
    state.t = 0.0;
    state.mesh = std::make_shared<SurfaceMesh>(make_surface(s.surface, s.subdiv));
    state.sampling = std::make_shared<InteriorSampling>(build_sampling(state.mesh, s.h));

    VelocityModel model = make_velocity_model(s.velocity);
    if (s.velocity.kind == VelocitySpec::Kind::Dipole) {
        if (state.sampling->surface->signed_distance(s.velocity.dipole_center) <= 0.0) {
            throw ConfigError("dipole center must lie outside the fluid");
        }
    }
    state.u = sample_vector(*state.sampling, model.velocity);
    state.omega = sample_vector(*state.sampling, model.vorticity);
    state.U.resize(state.mesh->vertex_count());
    for (int v = 0; v < state.mesh->vertex_count(); ++v) {
        state.U[v] = model.velocity(state.mesh->vertices[v]);
    }
    return state;
}

namespace {

// marker state for one RK4 step: boundary vertices plus grid-labelled
// interior markers (displacement fields on the step-start grid)
struct Markers {
    std::vector<Vec3> Xb, Ub;
    VectorField3 D, U, W;  // displacement, velocity, vorticity per origin cell
};

struct MarkerSlope {
    std::vector<Vec3> dXb, dUb;
    std::vector<Vec3> dD, dU, dW;  // per origin cell (raw arrays)
};

// x such that x + D(x) = target, by fixed-point iteration (displacements are
// a fraction of h within one step)
Vec3 backtrace(const VectorField3& D, const Vec3& target) {
    Vec3 x = target;
    for (int it = 0; it < 3; ++it) {
        Vec3 d;
        interpolate(D, x, d);
        x = target - d;
    }
    return x;
}

// evaluate the stage derivative at markers y
MarkerSlope stage_derivative(const Markers& y, const SurfaceMesh& base_mesh, double h) {
    const InteriorSampling& g0 = *y.D.grid;

    // stage mesh
    auto mesh_s = std::make_shared<SurfaceMesh>(base_mesh);
    mesh_s->vertices = y.Xb;
    refresh_geometry(*mesh_s);
    auto sampling_s = std::make_shared<InteriorSampling>(build_sampling(mesh_s, h));

    // stage velocity field on the stage grid via backtrace into origin labels
    VectorField3 D_ext = y.D, U_ext = y.U;
    extrapolate_band(D_ext);
    extrapolate_band(U_ext);
    VectorField3 u_s(*sampling_s);
    for (int idx = 0; idx < sampling_s->total_cells(); ++idx) {
        if (std::abs(sampling_s->sdist[idx]) > 2.0 * h && sampling_s->sdist[idx] > 0.0) continue;
        Vec3 origin = backtrace(D_ext, sampling_s->center(idx));
        Vec3 val;
        if (interpolate(U_ext, origin, val)) {
            u_s.v[idx] = val;
            u_s.valid[idx] = 1;
        }
    }

    FlowState stage;
    stage.mesh = mesh_s;
    stage.sampling = sampling_s;
    stage.u = u_s;
    stage.U = y.Ub;
    ScalarField3 p = pressure_solve(stage);

    ScalarField3 p_int = p;
    for (int idx = 0; idx < sampling_s->total_cells(); ++idx) {
        if (!sampling_s->is_solver(idx)) p_int.valid[idx] = 0;
    }
    VectorField3 grad_p = gradient(p_int);
    extrapolate_band(grad_p);
    MatrixField3 grad_u = vector_gradient(u_s);

    std::vector<double> dnp = normal_derivative_at_vertices(*mesh_s, p);
    // one ring-averaging pass on the boundary forcing: consistent at
    // O(h_mesh^2) on smooth fields and damps the vertex-scale modes that
    // the Taylor-unstable configurations amplify
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> smoothed(dnp.size());
        for (int v = 0; v < mesh_s->vertex_count(); ++v) {
            double ring = 0.0;
            for (int w : mesh_s->vertex_neighbors[v]) ring += dnp[w];
            ring /= double(mesh_s->vertex_neighbors[v].size());
            smoothed[v] = 0.5 * (dnp[v] + ring);
        }
        dnp.swap(smoothed);
    }

    MarkerSlope k;
    int nv = static_cast<int>(y.Xb.size());
    k.dXb.resize(nv);
    k.dUb.resize(nv);
    for (int v = 0; v < nv; ++v) {
        k.dXb[v] = y.Ub[v];
        // p vanishes on the boundary, so grad p there is normal
        k.dUb[v] = -dnp[v] * mesh_s->vertex_normals[v];
    }

    int nc = g0.total_cells();
    k.dD.assign(nc, Vec3::Zero());
    k.dU.assign(nc, Vec3::Zero());
    k.dW.assign(nc, Vec3::Zero());
    for (int idx = 0; idx < nc; ++idx) {
        if (!y.U.valid[idx]) continue;
        Vec3 x_now = g0.center(idx) + y.D.v[idx];
        k.dD[idx] = y.U.v[idx];
        Vec3 gp;
        interpolate(grad_p, x_now, gp);
        k.dU[idx] = -gp;
        Mat3 gu;
        if (interpolate(grad_u, x_now, gu)) {
            k.dW[idx] = gu.transpose() * y.W.v[idx];  // (omega . grad) u
        }
    }
    return k;
}

Markers advance(const Markers& y0, const MarkerSlope& k, double factor) {
    Markers y = y0;
    for (size_t v = 0; v < y.Xb.size(); ++v) {
        y.Xb[v] += factor * k.dXb[v];
        y.Ub[v] += factor * k.dUb[v];
    }
    for (size_t i = 0; i < y.D.v.size(); ++i) {
        if (!y.U.valid[i]) continue;
        y.D.v[i] += factor * k.dD[i];
        y.U.v[i] += factor * k.dU[i];
        y.W.v[i] += factor * k.dW[i];
    }
    return y;
}

} // namespace

std::pair<FlowState, StepReport> step_rk4(const FlowState& state, double dt,
                                          double quality_floor, bool stabilize) {
    const InteriorSampling& g0 = *state.sampling;
    const double h = g0.h;

    StepReport report;
    for (int idx = 0; idx < g0.total_cells(); ++idx) {
        if (state.u.valid[idx] && g0.is_solver(idx)) {
            report.u_sup = std::max(report.u_sup, state.u.v[idx].norm());
        }
    }
    for (const Vec3& u : state.U) report.u_sup = std::max(report.u_sup, u.norm());
    if (report.u_sup > 0.0 && dt > 0.5 * h / report.u_sup + 1e-14) {
        throw CFLViolation("dt " + std::to_string(dt) + " exceeds 0.5 h / |u| = " +
                           std::to_string(0.5 * h / report.u_sup));
    }
    report.div_sup = divergence_sup(state);

    Markers y0;
    y0.Xb = state.mesh->vertices;
    y0.Ub = state.U;
    y0.D = VectorField3(g0);
    for (int idx = 0; idx < g0.total_cells(); ++idx) y0.D.valid[idx] = state.u.valid[idx];
    y0.U = state.u;
    y0.W = state.omega;

    MarkerSlope k1 = stage_derivative(y0, *state.mesh, h);
    MarkerSlope k2 = stage_derivative(advance(y0, k1, 0.5 * dt), *state.mesh, h);
    MarkerSlope k3 = stage_derivative(advance(y0, k2, 0.5 * dt), *state.mesh, h);
    MarkerSlope k4 = stage_derivative(advance(y0, k3, dt), *state.mesh, h);

    Markers y1 = y0;
    for (size_t v = 0; v < y1.Xb.size(); ++v) {
        y1.Xb[v] += dt / 6.0 * (k1.dXb[v] + 2.0 * k2.dXb[v] + 2.0 * k3.dXb[v] + k4.dXb[v]);
        y1.Ub[v] += dt / 6.0 * (k1.dUb[v] + 2.0 * k2.dUb[v] + 2.0 * k3.dUb[v] + k4.dUb[v]);
    }
    for (size_t i = 0; i < y1.D.v.size(); ++i) {
        if (!y1.U.valid[i]) continue;
        y1.D.v[i] += dt / 6.0 * (k1.dD[i] + 2.0 * k2.dD[i] + 2.0 * k3.dD[i] + k4.dD[i]);
        y1.U.v[i] += dt / 6.0 * (k1.dU[i] + 2.0 * k2.dU[i] + 2.0 * k3.dU[i] + k4.dU[i]);
        y1.W.v[i] += dt / 6.0 * (k1.dW[i] + 2.0 * k2.dW[i] + 2.0 * k3.dW[i] + k4.dW[i]);
    }

    // rebuild surface and sampling, then resample the marker fields
    FlowState next;
    next.t = state.t + dt;
    auto mesh1 = std::make_shared<SurfaceMesh>(*state.mesh);
    mesh1->vertices = y1.Xb;
    refresh_geometry(*mesh1);

    if (stabilize) {
    // Boundary-velocity conditioning. Taylor-violated states are
    // Hadamard-unstable, so vertex-scale shape modes are damped with a graph
    // filter on the normal velocity; afterwards the single global
    // incompressibility constraint (enclosed-volume rate
    // sum_v dV/dx_v . u_v = 0, exact for the continuum flow) is projected
    // out, removing the O(h^2) flux bias of the discrete dynamics.
    {
        const double beta = 0.04;
        const int nv = mesh1->vertex_count();
        std::vector<Vec3> vg(nv, Vec3::Zero());
        for (const auto& t : mesh1->faces) {
            const Vec3 &x0 = mesh1->vertices[t[0]], &x1 = mesh1->vertices[t[1]],
                       &x2 = mesh1->vertices[t[2]];
            vg[t[0]] += x1.cross(x2) / 6.0;
            vg[t[1]] += x2.cross(x0) / 6.0;
            vg[t[2]] += x0.cross(x1) / 6.0;
        }
        // filter the deviation from the best-fit uniform translation so
        // exactly representable rigid motions pass through untouched
        Vec3 mean_u = Vec3::Zero();
        double area_sum = 0.0;
        for (int v = 0; v < nv; ++v) {
            mean_u += mesh1->vertex_areas[v] * y1.Ub[v];
            area_sum += mesh1->vertex_areas[v];
        }
        mean_u /= area_sum;

        std::vector<double> q(nv), un(nv), wgt(nv);
        double mean_w = 0.0;
        for (int v = 0; v < nv; ++v) {
            wgt[v] = vg[v].norm();
            q[v] = vg[v].dot(y1.Ub[v] - mean_u);
            un[v] = wgt[v] > 0.0 ? q[v] / wgt[v] : 0.0;
            mean_w += wgt[v];
        }
        mean_w /= nv;
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<double> dq(nv, 0.0);
            for (int v = 0; v < nv; ++v) {
                double s = 0.0;
                for (int w : mesh1->vertex_neighbors[v]) s += un[w] - un[v];
                dq[v] = beta * mean_w * s;
            }
            for (int v = 0; v < nv; ++v) {
                q[v] += dq[v];
                un[v] = wgt[v] > 0.0 ? q[v] / wgt[v] : 0.0;
            }
        }
        for (int v = 0; v < nv; ++v) {
            if (wgt[v] <= 0.0) continue;
            double delta = q[v] - vg[v].dot(y1.Ub[v] - mean_u);
            y1.Ub[v] += (delta / (wgt[v] * wgt[v])) * vg[v];
        }

        double flux = 0.0, denom = 0.0;
        for (int v = 0; v < nv; ++v) {
            flux += vg[v].dot(y1.Ub[v]);
            denom += vg[v].squaredNorm();
        }
        if (denom > 0.0) {
            for (int v = 0; v < nv; ++v) y1.Ub[v] -= (flux / denom) * vg[v];
        }
    }
    }

    report.quality_min = mesh1->min_triangle_quality();
    if (report.quality_min < quality_floor) {
        throw MeshQualityFailure("triangle quality " + std::to_string(report.quality_min) +
                                 " below floor " + std::to_string(quality_floor));
    }
    next.mesh = mesh1;
    next.sampling = std::make_shared<InteriorSampling>(build_sampling(mesh1, h));
    next.U = y1.Ub;

    VectorField3 D_ext = y1.D, U_ext = y1.U, W_ext = y1.W;
    W_ext.valid = y1.U.valid;
    extrapolate_band(D_ext);
    extrapolate_band(U_ext);
    extrapolate_band(W_ext);

    next.u = VectorField3(*next.sampling);
    next.omega = VectorField3(*next.sampling);
    for (int idx = 0; idx < next.sampling->total_cells(); ++idx) {
        double sd = next.sampling->sdist[idx];
        if (sd > 2.0 * h) continue;  // keep interior plus the outer band
        Vec3 origin = backtrace(D_ext, next.sampling->center(idx));
        Vec3 uval, wval;
        bool ok_u = interpolate(U_ext, origin, uval);
        bool ok_w = interpolate(W_ext, origin, wval);
        if (ok_u) {
            next.u.v[idx] = uval;
            next.u.valid[idx] = 1;
        }
        if (ok_w) {
            next.omega.v[idx] = wval;
            next.omega.valid[idx] = 1;
        }
    }
    return {next, report};
}

Trajectory run(const Scenario& s) {
    Trajectory traj;
    FlowState state = init_scenario(s);
    int steps = static_cast<int>(std::llround(s.t_end / s.dt));

    auto record_and_check = [&](const FlowState& st) -> std::optional<std::string> {
        LayerOperator op(*st.mesh);
        DiagnosticsRecord rec = compute_record(st, op);
        traj.records.push_back(rec);
        if (rec.K > s.events.K_max) return "K_max";
        if (rec.taylor_margin < s.events.taylor_min) return "taylor_sign";
        return std::nullopt;
    };

    traj.snapshots.push_back(state);
    traj.snapshot_steps.push_back(0);
    if (auto event = record_and_check(state)) {
        traj.termination = *event;
        return traj;
    }

    for (int step = 1; step <= steps; ++step) {
        try {
            auto [next, rep] = step_rk4(state, s.dt, s.events.quality_floor);
            state = std::move(next);
        } catch (const MeshQualityFailure&) {
            traj.termination = "mesh_quality";
            return traj;
        } catch (const CFLViolation&) {
            traj.termination = "cfl";
            return traj;
        } catch (const SolverDiverged&) {
            traj.termination = "solver_failure";
            return traj;
        } catch (const ResolutionTooCoarse&) {
            traj.termination = "mesh_quality";
            return traj;
        }
        if (s.snapshot_every > 0 && step % s.snapshot_every == 0) {
            traj.snapshots.push_back(state);
            traj.snapshot_steps.push_back(step);
        }
        if (auto event = record_and_check(state)) {
            traj.termination = *event;
            return traj;
        }
    }
    traj.termination = "completed";
    return traj;
}

double volume_drift(const Trajectory& traj) {
    if (traj.records.size() < 2) throw Error("volume_drift needs at least 2 records");
    double v0 = traj.records.front().volume;
    double worst = 0.0;
    for (const auto& r : traj.records) {
        worst = std::max(worst, std::abs(r.volume - v0) / v0);
    }
    return worst;
}

double vorticity_consistency(const FlowState& state) {
    // compare on the interior core where the curl stencils are centered;
    // one-sided stencils in the cut band measure the discretization of the
    // boundary layer, not the transport consistency
    const InteriorSampling& g = *state.sampling;
    VectorField3 cu = curl(state.u);
    double core = -3.0 * g.h;
    long core_cells = 0;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (g.sdist[idx] < core) ++core_cells;
    }
    if (core_cells == 0) core = 0.0;  // degenerate domains: use everything
    double num = 0.0, den = 0.0;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (g.sdist[idx] >= core) continue;
        if (!(cu.valid[idx] && state.omega.valid[idx])) continue;
        double w = g.cell_weight(idx);
        num += w * (state.omega.v[idx] - cu.v[idx]).squaredNorm();
        den += w * state.omega.v[idx].squaredNorm();
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
    return std::sqrt(num / den);
}

} // namespace fbeuler
