#include "fbeuler/poisson.hpp"

#include <cmath>

namespace fbeuler {

namespace {

struct CutFace {
    int cell;        // compact solver index of the interior cell
    double inv_t;    // 1/t, interface fraction along the crossing
    double g;        // Dirichlet value at the crossing point
};

constexpr double kMinFraction = 1e-2;

} // namespace

ScalarField3 poisson_dirichlet(const InteriorSampling& g,
                               const ScalarField3& source,
                               const std::function<double(const Vec3&)>& boundary) {
    const int n = g.total_cells();
    std::vector<int> compact(n, -1);
    std::vector<int> cells;
    cells.reserve(g.solver_cell_count);
    for (int idx = 0; idx < n; ++idx) {
        if (g.is_solver(idx)) {
            compact[idx] = static_cast<int>(cells.size());
            cells.push_back(idx);
        }
    }
    const int m = static_cast<int>(cells.size());
    const double inv_h2 = 1.0 / (g.h * g.h);

    // assemble sparse structure: per cell, up to 6 neighbor couplings
    std::vector<double> diag(m, 0.0);
    std::vector<double> rhs(m, 0.0);
    std::vector<std::array<int, 6>> nbr(m);
    std::vector<std::array<double, 6>> coef(m);

    const int di[6] = {1, -1, 0, 0, 0, 0};
    const int dj[6] = {0, 0, 1, -1, 0, 0};
    const int dk[6] = {0, 0, 0, 0, 1, -1};

    for (int c = 0; c < m; ++c) {
        int idx = cells[c];
        int i = idx % g.dims[0], j = (idx / g.dims[0]) % g.dims[1],
            k = idx / (g.dims[0] * g.dims[1]);
        rhs[c] = -source.v[idx];  // solving -laplacian q = -source
        double d_c = g.sdist[idx];
        for (int f = 0; f < 6; ++f) {
            nbr[c][f] = -1;
            coef[c][f] = 0.0;
            int ii = i + di[f], jj = j + dj[f], kk = k + dk[f];
            if (!g.in_bounds(ii, jj, kk)) continue;
            int nidx = g.lin(ii, jj, kk);
            if (g.is_solver(nidx)) {
                nbr[c][f] = compact[nidx];
                coef[c][f] = -inv_h2;
                diag[c] += inv_h2;
            } else {
                // ghost neighbor: interface at fraction t along the segment
                double d_n = g.sdist[nidx];
                double t = d_c / (d_c - d_n);
                if (t < kMinFraction) t = kMinFraction;
                if (t > 1.0) t = 1.0;
                diag[c] += inv_h2 / t;
                if (boundary) {
                    Vec3 cut = g.center(idx) + t * g.h * Vec3(double(di[f]), double(dj[f]),
                                                              double(dk[f]));
                    rhs[c] += boundary(cut) * inv_h2 / t;
                }
            }
        }
    }

    // Jacobi-preconditioned CG
    std::vector<double> x(m, 0.0), r = rhs, z(m), p(m), Ap(m);
    double bnorm = 0.0;
    for (double v : rhs) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    ScalarField3 out(g);
    if (bnorm == 0.0) {
        for (int c = 0; c < m; ++c) {
            out.v[cells[c]] = 0.0;
            out.valid[cells[c]] = 1;
        }
        if (boundary) {
            extrapolate_band(out, boundary);
        } else {
            extrapolate_band(out, [](const Vec3&) { return 0.0; });
        }
        return out;
    }

    auto apply = [&](const std::vector<double>& in, std::vector<double>& result) {
        for (int c = 0; c < m; ++c) {
            double s = diag[c] * in[c];
            for (int f = 0; f < 6; ++f) {
                if (nbr[c][f] >= 0) s += coef[c][f] * in[nbr[c][f]];
            }
            result[c] = s;
        }
    };

    double rz = 0.0;
    for (int c = 0; c < m; ++c) {
        z[c] = r[c] / diag[c];
        p[c] = z[c];
        rz += r[c] * z[c];
    }
    const int max_iters = 20000;
    bool converged = false;
    for (int it = 0; it < max_iters; ++it) {
        apply(p, Ap);
        double pAp = 0.0;
        for (int c = 0; c < m; ++c) pAp += p[c] * Ap[c];
        if (pAp <= 0.0) throw SolverDiverged("CG lost positive definiteness");
        double alpha = rz / pAp;
        double rnorm = 0.0;
        for (int c = 0; c < m; ++c) {
            x[c] += alpha * p[c];
            r[c] -= alpha * Ap[c];
            rnorm += r[c] * r[c];
        }
        if (std::sqrt(rnorm) < 1e-10 * bnorm) {
            converged = true;
            break;
        }
        double rz_new = 0.0;
        for (int c = 0; c < m; ++c) {
            z[c] = r[c] / diag[c];
            rz_new += r[c] * z[c];
        }
        double beta = rz_new / rz;
        rz = rz_new;
        for (int c = 0; c < m; ++c) p[c] = z[c] + beta * p[c];
    }
    if (!converged) throw SolverDiverged("CG did not reach 1e-10 relative residual");

    for (int c = 0; c < m; ++c) {
        out.v[cells[c]] = x[c];
        out.valid[cells[c]] = 1;
    }
    if (boundary) {
        extrapolate_band(out, boundary);
    } else {
        extrapolate_band(out, [](const Vec3&) { return 0.0; });
    }
    return out;
}

ScalarField3 poisson_dirichlet(const InteriorSampling& g,
                               const ScalarField3& source,
                               const BoundaryScalar& boundary) {
    const TriangleGrid& surf = *g.surface;
    auto bc = [&](const Vec3& p) { return surf.interpolate(boundary.values, p); };
    return poisson_dirichlet(g, source, bc);
}

} // namespace fbeuler
