#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fbeuler/mesh_gen.hpp"
#include "fbeuler/potential_theory.hpp"
#include "fbeuler/spherical_harmonics.hpp"

using namespace fbeuler;

namespace {

BoundaryScalar sample_on_mesh(const SurfaceMesh& m, int l, int mm) {
    BoundaryScalar psi = BoundaryScalar::zeros(m);
    for (int v = 0; v < m.vertex_count(); ++v) {
        psi[v] = solid_harmonic(l, mm, m.vertices[v]);
    }
    return psi;
}

std::vector<Vec3> ball_points(double rmax, int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-rmax, rmax);
    std::vector<Vec3> pts;
    while (static_cast<int>(pts.size()) < n) {
        Vec3 p(u(rng), u(rng), u(rng));
        if (p.norm() < rmax) pts.push_back(p);
    }
    return pts;
}

} // namespace

TEST_CASE("assemble: constant density maps to -1 in the interior") {
    SurfaceMesh m = icosphere(3, 1.0);
    LayerOperator op = assemble(m);
    std::vector<double> ones(m.vertex_count(), 1.0);
    CHECK(op.evaluate(ones, Vec3(0, 0, 0)) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(op.evaluate(ones, Vec3(0.4, -0.3, 0.2)) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(op.condition_estimate() < 1e12);
    CHECK(std::isfinite(assemble(ellipsoid(3, 2.0, 1.0, 1.0)).condition_estimate()));
}

TEST_CASE("assemble: rejects tiny meshes") {
    CHECK_THROWS(assemble(icosphere(1, 1.0)));
}

TEST_CASE("harmonic_extension: constants and linear functions are exact-ish") {
    SurfaceMesh m = icosphere(4, 1.0);
    LayerOperator op = assemble(m);
    std::vector<Vec3> pts = ball_points(0.4, 25, 11);

    BoundaryScalar one(m, std::vector<double>(m.vertex_count(), 1.0));
    for (double v : harmonic_extension(op, one, pts)) {
        CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }

    BoundaryScalar x3 = sample_on_mesh(m, 1, 0);
    std::vector<double> vals = harmonic_extension(op, x3, pts);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(std::abs(vals[i] - solid_harmonic(1, 0, pts[i])) < 1e-4);
    }
}

TEST_CASE("harmonic_extension: degree-2 harmonic at half radius") {
    SurfaceMesh m = icosphere(4, 1.0);
    LayerOperator op = assemble(m);
    std::vector<Vec3> pts;
    for (const Vec3& p : ball_points(1.0, 40, 7)) pts.push_back(0.5 * p.normalized());
    BoundaryScalar y2 = sample_on_mesh(m, 2, -2);  // ~ x1 x2 restricted
    std::vector<double> vals = harmonic_extension(op, y2, pts);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(std::abs(vals[i] - solid_harmonic(2, -2, pts[i])) < 1e-3);
    }
}

TEST_CASE("harmonic_extension: proximity guard") {
    SurfaceMesh m = icosphere(3, 1.0);
    LayerOperator op = assemble(m);
    BoundaryScalar one(m, std::vector<double>(m.vertex_count(), 1.0));
    std::vector<Vec3> close = {Vec3(0.999, 0, 0)};
    CHECK_THROWS_AS(harmonic_extension(op, one, close), PointTooClose);
}

TEST_CASE("harmonic_extension: mean value property at the center") {
    SurfaceMesh m = icosphere(4, 1.0);
    LayerOperator op = assemble(m);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BoundaryScalar psi = BoundaryScalar::zeros(m);
    for (int v = 0; v < m.vertex_count(); ++v) {
        const Vec3& p = m.vertices[v];
        psi[v] = 0.4 + solid_harmonic(1, 1, p) - 0.6 * solid_harmonic(2, 0, p) +
                 0.3 * solid_harmonic(3, 2, p);
    }
    double avg = boundary_integral(m, psi.values) / m.total_area;
    double center = harmonic_extension(op, psi, {Vec3::Zero()})[0];
    CHECK(std::abs(center - avg) < 1e-4);
}

TEST_CASE("dtn: spherical harmonic eigenvalues l/R") {
    SurfaceMesh m = icosphere(4, 1.0);
    LayerOperator op = assemble(m);

    BoundaryScalar one(m, std::vector<double>(m.vertex_count(), 1.0));
    BoundaryScalar d0 = dtn(op, one);
    double sup0 = 0.0;
    for (int v = 0; v < m.vertex_count(); ++v) sup0 = std::max(sup0, std::abs(d0[v]));
    CHECK(sup0 < 1e-5);

    BoundaryScalar y1 = sample_on_mesh(m, 1, 0);
    BoundaryScalar d1 = dtn(op, y1);
    double err = 0.0, scale = 0.0;
    for (int v = 0; v < m.vertex_count(); ++v) {
        err = std::max(err, std::abs(d1[v] - 1.0 * y1[v]));
        scale = std::max(scale, std::abs(y1[v]));
    }
    CHECK(err / scale < 0.02);
}

TEST_CASE("dtn: eigenvalue on a radius-2 sphere") {
    SurfaceMesh m = icosphere(4, 2.0);
    LayerOperator op = assemble(m);
    BoundaryScalar y2 = sample_on_mesh(m, 2, 1);
    BoundaryScalar d = dtn(op, y2);
    // eigenvalue l/R = 1
    double err = 0.0, scale = 0.0;
    for (int v = 0; v < m.vertex_count(); ++v) {
        err = std::max(err, std::abs(d[v] - y2[v]));
        scale = std::max(scale, std::abs(y2[v]));
    }
    CHECK(err / scale < 0.03);
}

TEST_CASE("dtn: linearity to solver precision") {
    SurfaceMesh m = icosphere(3, 1.0);
    LayerOperator op = assemble(m);
    BoundaryScalar f = sample_on_mesh(m, 2, 0), g = sample_on_mesh(m, 1, -1);
    BoundaryScalar combo = BoundaryScalar::zeros(m);
    for (int v = 0; v < m.vertex_count(); ++v) combo[v] = 2.5 * f[v] - 1.25 * g[v];
    BoundaryScalar df = dtn(op, f), dg = dtn(op, g), dc = dtn(op, combo);
    double worst = 0.0, scale = 0.0;
    for (int v = 0; v < m.vertex_count(); ++v) {
        worst = std::max(worst, std::abs(dc[v] - (2.5 * df[v] - 1.25 * dg[v])));
        scale = std::max(scale, std::abs(dc[v]));
    }
    CHECK(worst < 1e-10 * std::max(1.0, scale));
}

TEST_CASE("dtn: positivity of the Dirichlet form for random data") {
    SurfaceMesh m = icosphere(3, 1.0);
    LayerOperator op = assemble(m);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        BoundaryScalar psi = BoundaryScalar::zeros(m);
        double coeffs[3][7];
        for (int l = 1; l <= 3; ++l) {
            for (int mm = -l; mm <= l; ++mm) coeffs[l - 1][mm + l] = u(rng);
        }
        for (int v = 0; v < m.vertex_count(); ++v) {
            double s = 0.3;
            for (int l = 1; l <= 3; ++l) {
                for (int mm = -l; mm <= l; ++mm) {
                    s += coeffs[l - 1][mm + l] * solid_harmonic(l, mm, m.vertices[v]);
                }
            }
            psi[v] = s;
        }
        BoundaryScalar d = dtn(op, psi);
        std::vector<double> prod(m.vertex_count());
        for (int v = 0; v < m.vertex_count(); ++v) prod[v] = psi[v] * d[v];
        CHECK(boundary_integral(m, prod) >= -1e-6);
    }
}

TEST_CASE("greens_function: ball image-formula oracle") {
    SurfaceMesh m = icosphere(4, 1.0);
    LayerOperator op = assemble(m);

    // hand value: R=1, x=0, y=(0.5,0,0) -> 1/(4 pi)
    double hand = 1.0 / (4.0 * M_PI);
    CHECK(ball_green_oracle(1.0, Vec3::Zero(), Vec3(0.5, 0, 0)) ==
          doctest::Approx(hand).epsilon(1e-14));
    CHECK(greens_function(op, Vec3::Zero(), Vec3(0.5, 0, 0)) ==
          doctest::Approx(hand).epsilon(0.02));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    int tested = 0;
    while (tested < 12) {
        Vec3 x(u(rng), u(rng), u(rng)), y(u(rng), u(rng), u(rng));
        if (x.norm() > 0.8 || y.norm() > 0.8 || (x - y).norm() < 0.2) continue;
        ++tested;
        double g = greens_function(op, x, y);
        double ref = ball_green_oracle(1.0, x, y);
        CHECK(std::abs(g - ref) < 0.02 * std::abs(ref));
        CHECK(std::abs(g - greens_function(op, y, x)) < 1e-4);
        CHECK(g >= -1e-6);
    }
}

TEST_CASE("ball_green_oracle: boundary decay, symmetry, guards") {
    Vec3 x(0.2, 0.1, -0.3);
    // y walking to the boundary radially
    double prev = 1.0;
    for (double r : {0.9, 0.99, 0.999}) {
        double g = ball_green_oracle(1.0, x, r * Vec3(0, 1, 0));
        CHECK(g < prev);
        prev = g;
    }
    CHECK(prev < 2e-3);
    Vec3 y(-0.4, 0.5, 0.1);
    CHECK(ball_green_oracle(1.0, x, y) == doctest::Approx(ball_green_oracle(1.0, y, x)));
    CHECK_THROWS_AS(ball_green_oracle(1.0, x, x), CoincidentPoints);
    CHECK_THROWS_AS(ball_green_oracle(1.0, x, Vec3(2, 0, 0)), OutsideBall);
}

TEST_CASE("bernstein_gap: linear data has equal sups; maximum principle holds") {
    SurfaceMesh m = icosphere(4, 1.0);
    LayerOperator op = assemble(m);
    std::vector<Vec3> samples = ball_points(0.7, 30, 17);

    BoundaryScalar x3 = sample_on_mesh(m, 1, 0);
    auto [isup, bsup] = bernstein_gap(op, x3, samples);
    double c = 1.0 / 0.48860251190291992;  // solid harmonic normalization
    CHECK(isup * c == doctest::Approx(1.0).epsilon(0.02));
    CHECK(bsup * c == doctest::Approx(1.0).epsilon(0.02));

    BoundaryScalar y2 = sample_on_mesh(m, 2, 2);
    auto [i2, b2] = bernstein_gap(op, y2, samples);
    CHECK(i2 <= b2 * 1.05);

    BoundaryScalar cst(m, std::vector<double>(m.vertex_count(), 2.0));
    auto [ic, bc] = bernstein_gap(op, cst, samples);
    CHECK(ic < 1e-4);
    CHECK(bc < 1e-4);
}
