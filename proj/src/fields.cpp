#include "fbeuler/fields.hpp"

#include <cmath>

namespace fbeuler {

ScalarField3 sample_scalar(const InteriorSampling& g,
                           const std::function<double(const Vec3&)>& f) {
    ScalarField3 out(g);
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        out.v[idx] = f(g.center(idx));
        out.valid[idx] = 1;
    }
    return out;
}

VectorField3 sample_vector(const InteriorSampling& g,
                           const std::function<Vec3(const Vec3&)>& f) {
    VectorField3 out(g);
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        out.v[idx] = f(g.center(idx));
        out.valid[idx] = 1;
    }
    return out;
}

namespace {

inline void set_zero(double& x) { x = 0.0; }
inline void set_zero(Vec3& x) { x.setZero(); }
inline void set_zero(Mat3& x) { x.setZero(); }

// shared trilinear machinery: gathers the 8 corners if all are valid
template <typename FieldT, typename ValueT>
bool trilerp(const FieldT& f, const Vec3& p, ValueT& out) {
    const InteriorSampling& g = *f.grid;
    Vec3 rel = (p - g.origin) / g.h;
    int i = int(std::floor(rel[0])), j = int(std::floor(rel[1])), k = int(std::floor(rel[2]));
    if (!g.in_bounds(i, j, k) || !g.in_bounds(i + 1, j + 1, k + 1)) return false;
    double fx = rel[0] - i, fy = rel[1] - j, fz = rel[2] - k;
    ValueT acc;
    set_zero(acc);
    for (int dk = 0; dk < 2; ++dk) {
        for (int dj = 0; dj < 2; ++dj) {
            for (int di = 0; di < 2; ++di) {
                int idx = g.lin(i + di, j + dj, k + dk);
                if (!f.valid[idx]) return false;
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                acc += w * f.v[idx];
            }
        }
    }
    out = acc;
    return true;
}

// nearest valid cell within an expanding neighborhood
template <typename FieldT, typename ValueT>
bool nearest_valid(const FieldT& f, const Vec3& p, ValueT& out) {
    const InteriorSampling& g = *f.grid;
    Vec3 rel = (p - g.origin) / g.h;
    int ci = int(std::round(rel[0])), cj = int(std::round(rel[1])), ck = int(std::round(rel[2]));
    for (int ring = 0; ring <= 3; ++ring) {
        double best = std::numeric_limits<double>::max();
        int best_idx = -1;
        for (int k = ck - ring; k <= ck + ring; ++k) {
            for (int j = cj - ring; j <= cj + ring; ++j) {
                for (int i = ci - ring; i <= ci + ring; ++i) {
                    if (!g.in_bounds(i, j, k)) continue;
                    int idx = g.lin(i, j, k);
                    if (!f.valid[idx]) continue;
                    double d2 = (g.center(i, j, k) - p).squaredNorm();
                    if (d2 < best) { best = d2; best_idx = idx; }
                }
            }
        }
        if (best_idx >= 0) {
            out = f.v[best_idx];
            return true;
        }
    }
    return false;
}

template <typename FieldT, typename ValueT>
bool interp_impl(const FieldT& f, const Vec3& p, ValueT& out) {
    set_zero(out);
    if (trilerp(f, p, out)) return true;
    return nearest_valid(f, p, out);
}

} // namespace

bool interpolate(const ScalarField3& f, const Vec3& p, double& out) {
    return interp_impl(f, p, out);
}

bool interpolate(const VectorField3& f, const Vec3& p, Vec3& out) {
    return interp_impl(f, p, out);
}

bool interpolate(const MatrixField3& f, const Vec3& p, Mat3& out) {
    return interp_impl(f, p, out);
}

namespace {

template <typename FieldT, typename ValueT, typename BCFn>
void extrapolate_band_impl(FieldT& f, const BCFn* bc) {
    const InteriorSampling& g = *f.grid;
    FieldT base = f;  // probe against the pre-extrapolation values
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        double d = g.sdist[idx];
        if (d < 0.0 || d > 2.0 * g.h || f.valid[idx]) continue;
        Vec3 x = g.center(idx);
        Vec3 cp = g.nearest_tri[idx] >= 0 ? g.nearest_point[idx] : g.surface->closest_point(x).first;
        Vec3 n = x - cp;
        double dist = n.norm();
        if (dist < 1e-12 * g.h) { n = Vec3(1, 0, 0); dist = 0.0; } else { n /= dist; }

        ValueT f1, f2;
        bool ok1 = interp_impl(base, x - (dist + 0.8 * g.h) * n, f1);
        bool ok2 = interp_impl(base, x - (dist + 1.8 * g.h) * n, f2);
        if (bc) {
            // linear through the boundary value at the interface
            ValueT gb = (*bc)(cp);
            f.v[idx] = ok1 ? ValueT(gb + (gb - f1) * (dist / (0.8 * g.h))) : gb;
            f.valid[idx] = 1;
        } else if (ok1 && ok2) {
            f.v[idx] = f1 + (f1 - f2) * ((dist + 0.8 * g.h) / g.h);
            f.valid[idx] = 1;
        } else if (ok1) {
            f.v[idx] = f1;
            f.valid[idx] = 1;
        }
    }
}

} // namespace

void extrapolate_band(ScalarField3& f, const std::function<double(const Vec3&)>& boundary_value) {
    if (boundary_value) {
        extrapolate_band_impl<ScalarField3, double>(f, &boundary_value);
    } else {
        extrapolate_band_impl<ScalarField3, double, std::function<double(const Vec3&)>>(f, nullptr);
    }
}

void extrapolate_band(VectorField3& f) {
    extrapolate_band_impl<VectorField3, Vec3, std::function<Vec3(const Vec3&)>>(f, nullptr);
}

namespace {

// one-dimensional derivative along axis a with centered stencil where both
// neighbors are valid, else one-sided second order, else one-sided first
// order; returns false if nothing works
template <typename FieldT, typename ValueT>
bool axis_derivative(const FieldT& f, int i, int j, int k, int a, ValueT& out) {
    const InteriorSampling& g = *f.grid;
    int di = a == 0, dj = a == 1, dk = a == 2;
    auto val = [&](int s, ValueT& v) {
        int ii = i + s * di, jj = j + s * dj, kk = k + s * dk;
        if (!g.in_bounds(ii, jj, kk)) return false;
        int idx = g.lin(ii, jj, kk);
        if (!f.valid[idx]) return false;
        v = f.v[idx];
        return true;
    };
    ValueT m1{}, p1{}, m2{}, p2{}, c0{};
    bool has_m1 = val(-1, m1), has_p1 = val(+1, p1);
    if (has_m1 && has_p1) {
        out = (p1 - m1) / (2.0 * g.h);
        return true;
    }
    if (!val(0, c0)) return false;
    if (has_p1 && val(+2, p2)) {
        out = (-3.0 * c0 + 4.0 * p1 - p2) / (2.0 * g.h);
        return true;
    }
    if (has_m1 && val(-2, m2)) {
        out = (3.0 * c0 - 4.0 * m1 + m2) / (2.0 * g.h);
        return true;
    }
    if (has_p1) { out = (p1 - c0) / g.h; return true; }
    if (has_m1) { out = (c0 - m1) / g.h; return true; }
    return false;
}

} // namespace

VectorField3 gradient(const ScalarField3& f) {
    const InteriorSampling& g = *f.grid;
    VectorField3 out(g);
    for (int k = 0; k < g.dims[2]; ++k) {
        for (int j = 0; j < g.dims[1]; ++j) {
            for (int i = 0; i < g.dims[0]; ++i) {
                int idx = g.lin(i, j, k);
                if (!f.valid[idx]) continue;
                Vec3 grad;
                bool ok = true;
                for (int a = 0; a < 3; ++a) {
                    double d;
                    ok = ok && axis_derivative<ScalarField3, double>(f, i, j, k, a, d);
                    if (ok) grad[a] = d;
                }
                if (ok) {
                    out.v[idx] = grad;
                    out.valid[idx] = 1;
                }
            }
        }
    }
    return out;
}

MatrixField3 vector_gradient(const VectorField3& f) {
    const InteriorSampling& g = *f.grid;
    MatrixField3 out;
    out.grid = &g;
    out.v.assign(g.total_cells(), Mat3::Zero());
    out.valid.assign(g.total_cells(), 0);
    for (int k = 0; k < g.dims[2]; ++k) {
        for (int j = 0; j < g.dims[1]; ++j) {
            for (int i = 0; i < g.dims[0]; ++i) {
                int idx = g.lin(i, j, k);
                if (!f.valid[idx]) continue;
                Mat3 m;
                bool ok = true;
                for (int a = 0; a < 3 && ok; ++a) {
                    Vec3 d;
                    ok = axis_derivative<VectorField3, Vec3>(f, i, j, k, a, d);
                    if (ok) m.row(a) = d.transpose();  // (grad u)_aj = d_a u_j
                }
                if (ok) {
                    out.v[idx] = m;
                    out.valid[idx] = 1;
                }
            }
        }
    }
    return out;
}

ScalarField3 divergence(const VectorField3& f) {
    MatrixField3 gu = vector_gradient(f);
    ScalarField3 out(*f.grid);
    for (int idx = 0; idx < f.grid->total_cells(); ++idx) {
        if (gu.valid[idx]) {
            out.v[idx] = gu.v[idx].trace();
            out.valid[idx] = 1;
        }
    }
    return out;
}

VectorField3 curl(const VectorField3& f) {
    MatrixField3 gu = vector_gradient(f);
    VectorField3 out(*f.grid);
    for (int idx = 0; idx < f.grid->total_cells(); ++idx) {
        if (!gu.valid[idx]) continue;
        const Mat3& m = gu.v[idx];  // m(a, j) = d_a u_j
        out.v[idx] = Vec3(m(1, 2) - m(2, 1), m(2, 0) - m(0, 2), m(0, 1) - m(1, 0));
        out.valid[idx] = 1;
    }
    return out;
}

VectorField3 vector_laplacian(const VectorField3& f) {
    // divergence of the gradient, built from the component Hessians' traces
    const InteriorSampling& g = *f.grid;
    VectorField3 out(g);
    std::vector<ScalarField3> comps(3, ScalarField3(g));
    for (int c = 0; c < 3; ++c) {
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            comps[c].v[idx] = f.v[idx][c];
            comps[c].valid[idx] = f.valid[idx];
        }
    }
    for (int c = 0; c < 3; ++c) {
        MatrixField3 h = hessian(comps[c]);
        for (int idx = 0; idx < g.total_cells(); ++idx) {
            if (c == 0) out.valid[idx] = 1;
            if (!h.valid[idx]) { out.valid[idx] = 0; continue; }
            if (out.valid[idx]) out.v[idx][c] = h.v[idx].trace();
        }
    }
    return out;
}

MatrixField3 hessian(const ScalarField3& f) {
    VectorField3 grad = gradient(f);
    return vector_gradient(grad);
}

TensorGridField tensor_from_scalar(const ScalarField3& f) {
    TensorGridField t;
    t.grid = f.grid;
    t.rank = 0;
    t.comp = {f.v};
    t.valid = f.valid;
    return t;
}

TensorGridField tensor_derivative(const TensorGridField& t) {
    const InteriorSampling& g = *t.grid;
    TensorGridField out;
    out.grid = t.grid;
    out.rank = t.rank + 1;
    size_t nc = t.comp.size();
    out.comp.assign(3 * nc, std::vector<double>(g.total_cells(), 0.0));
    out.valid.assign(g.total_cells(), 0);

    ScalarField3 tmp(g);
    std::vector<std::uint8_t> ok_all(g.total_cells(), 1);
    for (size_t c = 0; c < nc; ++c) {
        tmp.v = t.comp[c];
        tmp.valid = t.valid;
        for (int a = 0; a < 3; ++a) {
            for (int k = 0; k < g.dims[2]; ++k) {
                for (int j = 0; j < g.dims[1]; ++j) {
                    for (int i = 0; i < g.dims[0]; ++i) {
                        int idx = g.lin(i, j, k);
                        if (!t.valid[idx]) { ok_all[idx] = 0; continue; }
                        double d;
                        if (axis_derivative<ScalarField3, double>(tmp, i, j, k, a, d)) {
                            out.comp[a * nc + c][idx] = d;
                        } else {
                            ok_all[idx] = 0;
                        }
                    }
                }
            }
        }
    }
    out.valid = ok_all;
    return out;
}

double l2_norm(const ScalarField3& f) {
    const InteriorSampling& g = *f.grid;
    double s = 0.0;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!f.valid[idx]) continue;
        double w = g.cell_weight(idx);
        if (w > 0.0) s += w * f.v[idx] * f.v[idx];
    }
    return std::sqrt(s * g.h * g.h * g.h);
}

double l2_norm(const VectorField3& f) {
    const InteriorSampling& g = *f.grid;
    double s = 0.0;
    for (int idx = 0; idx < g.total_cells(); ++idx) {
        if (!f.valid[idx]) continue;
        double w = g.cell_weight(idx);
        if (w > 0.0) s += w * f.v[idx].squaredNorm();
    }
    return std::sqrt(s * g.h * g.h * g.h);
}

} // namespace fbeuler
