#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fbeuler/curvature.hpp"
#include "fbeuler/mesh_gen.hpp"
#include "fbeuler/spherical_harmonics.hpp"
#include "fbeuler/surface_mesh.hpp"
#include "oracles.hpp"

using namespace fbeuler;

namespace {
SurfaceMesh unit_tetrahedron_on_sphere() {
    double s = 1.0 / std::sqrt(3.0);
    std::vector<Vec3> v = {
        {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    std::vector<std::array<int, 3>> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return build_surface(v, f);
}
} // namespace

TEST_CASE("build_surface: icosphere volume approaches the sphere volume") {
    SurfaceMesh m = icosphere(3, 1.0);
    CHECK(m.vertex_count() == 642);
    double exact = 4.0 * M_PI / 3.0;
    CHECK(m.signed_volume == doctest::Approx(exact).epsilon(0.01));
    CHECK(m.signed_volume ==
          doctest::Approx(oracles::signed_volume(m.vertices, m.faces)).epsilon(1e-12));
}

TEST_CASE("build_surface: regular tetrahedron volume matches the determinant oracle") {
    SurfaceMesh m = unit_tetrahedron_on_sphere();
    double exact = 8.0 / (9.0 * std::sqrt(3.0));  // = 8 sqrt(3) / 27
    CHECK(m.signed_volume == doctest::Approx(exact).epsilon(1e-12));
    CHECK(oracles::signed_volume(m.vertices, m.faces) ==
          doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("build_surface: rejects non-manifold topology") {
    // two triangles sharing all three vertices: each edge has 2 faces but the
    // doubled sheet has zero volume and inconsistent orientation
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    std::vector<std::array<int, 3>> f = {{0, 1, 2}, {0, 1, 2}, {0, 1, 3}, {0, 1, 3}};
    CHECK_THROWS_AS(build_surface(v, f), NonManifold);

    // boundary edges: icosphere with one face removed
    SurfaceMesh sphere = icosphere(1, 1.0);
    auto open_faces = sphere.faces;
    open_faces.pop_back();
    CHECK_THROWS_AS(build_surface(sphere.vertices, open_faces), NonManifold);

    // two disjoint closed components
    SurfaceMesh a = icosphere(0, 1.0);
    SurfaceMesh b = icosphere(0, 1.0, Vec3(5, 0, 0));
    std::vector<Vec3> verts = a.vertices;
    verts.insert(verts.end(), b.vertices.begin(), b.vertices.end());
    std::vector<std::array<int, 3>> faces = a.faces;
    int off = a.vertex_count();
    for (auto t : b.faces) faces.push_back({t[0] + off, t[1] + off, t[2] + off});
    CHECK_THROWS_AS(build_surface(verts, faces), NonManifold);
}

TEST_CASE("build_surface: zero-volume closed mesh is rejected") {
    // squashed tetrahedron: consistent topology, coplanar vertices
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    std::vector<std::array<int, 3>> f = {{0, 1, 2}, {1, 3, 2}, {0, 2, 3}, {0, 3, 1}};
    CHECK_THROWS_AS(build_surface(v, f), InvertedOrientation);
}

TEST_CASE("build_surface: degenerate face is rejected") {
    SurfaceMesh m = icosphere(2, 1.0);
    auto verts = m.vertices;
    auto faces = m.faces;
    // collapse one vertex onto a neighbor
    verts[faces[0][1]] = verts[faces[0][0]];
    CHECK_THROWS_AS(build_surface(verts, faces), DegenerateFace);
}

TEST_CASE("build_surface: flipped input orientation is repaired") {
    SurfaceMesh m = icosphere(2, 1.0);
    auto faces = m.faces;
    for (auto& t : faces) std::swap(t[1], t[2]);
    SurfaceMesh fixed = build_surface(m.vertices, faces);
    CHECK(fixed.signed_volume > 0.0);
}

TEST_CASE("mesh invariants: normals unit, vertex areas sum to total area") {
    for (const SurfaceMesh& m : {icosphere(3, 1.0), ellipsoid(3, 2.0, 1.0, 1.0)}) {
        double area_sum = 0.0;
        for (int v = 0; v < m.vertex_count(); ++v) {
            CHECK(std::abs(m.vertex_normals[v].norm() - 1.0) < 1e-12);
            area_sum += m.vertex_areas[v];
        }
        CHECK(std::abs(area_sum - m.total_area) < 1e-10 * m.total_area);
    }
}

TEST_CASE("second_fundamental_form: sphere curvatures are +1/R") {
    SurfaceMesh m = icosphere(4, 2.0);
    CurvatureData c = second_fundamental_form(m);
    for (int v = 0; v < m.vertex_count(); ++v) {
        CHECK(std::abs(c.principal[v].first - 0.5) < 0.02 * 0.5);
        CHECK(std::abs(c.principal[v].second - 0.5) < 0.02 * 0.5);
        // symmetry and eigenvalue reconstruction
        Eigen::Matrix2d th = c.theta[v];
        CHECK(std::abs(th(0, 1) - th(1, 0)) < 1e-12);
        double tr = th.trace();
        double det = th.determinant();
        double k1 = c.principal[v].first, k2 = c.principal[v].second;
        CHECK(std::abs(k1 + k2 - tr) < 1e-10);
        CHECK(std::abs(k1 * k2 - det) < 1e-10);
    }
    CHECK(c.theta_sup == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(0.03));
}

TEST_CASE("second_fundamental_form: ellipsoid umbilic point value") {
    // (a,b,c) = (2,1,1): at (2,0,0) both principal curvatures are a/b^2 = 2
    SurfaceMesh m = ellipsoid(4, 2.0, 1.0, 1.0);
    CurvatureData c = second_fundamental_form(m);
    int apex = 0;
    double best = -1.0;
    for (int v = 0; v < m.vertex_count(); ++v) {
        if (m.vertices[v][0] > best) { best = m.vertices[v][0]; apex = v; }
    }
    REQUIRE(best == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(c.principal[apex].first - 2.0) < 0.05 * 2.0);
    CHECK(std::abs(c.principal[apex].second - 2.0) < 0.05 * 2.0);
}

TEST_CASE("second_fundamental_form: small meshes are rejected") {
    CHECK_THROWS_AS(second_fundamental_form(icosphere(1, 1.0)), InsufficientNeighborhood);
    CHECK_THROWS_AS(second_fundamental_form(unit_tetrahedron_on_sphere()),
                    InsufficientNeighborhood);
}

TEST_CASE("injectivity_radius: sphere reach equals the radius") {
    SurfaceMesh m = icosphere(3, 1.0);
    double i0 = injectivity_radius(m, 10.0);
    CHECK(i0 == doctest::Approx(1.0).epsilon(0.05));

    SurfaceMesh m3 = icosphere(3, 3.0);
    double i3 = injectivity_radius(m3, 10.0);
    CHECK(i3 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("injectivity_radius: dumbbell neck bounds the reach") {
    SurfaceMesh m = dumbbell(0.1);
    double i0 = injectivity_radius(m, 10.0);
    CHECK(i0 <= 0.15);
    // pair term agrees with the independent all-pairs oracle
    double pairs = oracles::reach_pairs(m);
    CHECK(i0 <= pairs + 1e-12);
}

TEST_CASE("injectivity_radius: never exceeds the min curvature radius") {
    for (const SurfaceMesh& m : {icosphere(3, 1.0), ellipsoid(3, 2.0, 1.0, 1.0)}) {
        CurvatureData c = second_fundamental_form(m);
        double min_curv_radius = std::numeric_limits<double>::max();
        for (auto [k1, k2] : c.principal) {
            double kmax = std::max(std::abs(k1), std::abs(k2));
            if (kmax > 0) min_curv_radius = std::min(min_curv_radius, 1.0 / kmax);
        }
        CHECK(injectivity_radius(m, c, 100.0) <= min_curv_radius + 1e-12);
    }
}

TEST_CASE("exterior_sphere_radius: convex body admits large exterior spheres") {
    SurfaceMesh m = icosphere(3, 1.0);
    CHECK(exterior_sphere_radius(m, 10.0) >= 5.0);
    CHECK(exterior_sphere_radius(m, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("exterior_sphere_radius: dumbbell saddle limits the radius") {
    SurfaceMesh m = dumbbell(0.1);
    double r = exterior_sphere_radius(m, 10.0);
    CHECK(r <= 0.2);
    // cross-check against the brute-force emptiness probe
    CHECK(!oracles::exterior_ball_blocked(m, 0.9 * r));
    CHECK(oracles::exterior_ball_blocked(m, 1.3 * std::max(r, 1e-3)));
}

TEST_CASE("tangential_gradient: constants, linear fields, pole behavior") {
    SurfaceMesh m = icosphere(4, 1.0);
    std::vector<double> constf(m.vertex_count(), 3.5);
    for (const Vec3& g : tangential_gradient(m, constf)) CHECK(g.norm() < 1e-12);

    std::vector<double> x3(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) x3[v] = m.vertices[v][2];
    auto grad = tangential_gradient(m, x3);
    double worst = 0.0;
    for (int v = 0; v < m.vertex_count(); ++v) {
        Vec3 xhat = m.vertices[v].normalized();
        Vec3 expected = Vec3(0, 0, 1) - m.vertices[v][2] * xhat;
        worst = std::max(worst, (grad[v] - expected).norm());
        CHECK(std::abs(grad[v].dot(m.vertex_normals[v])) < 1e-12);
    }
    CHECK(worst < 0.03);  // sup gradient magnitude is 1 on the equator

    // f = x1 at the (1,0,0) pole: gradient is purely normal there
    std::vector<double> x1(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) x1[v] = m.vertices[v][0];
    auto gx1 = tangential_gradient(m, x1);
    for (int v = 0; v < m.vertex_count(); ++v) {
        if ((m.vertices[v] - Vec3(1, 0, 0)).norm() < 1e-9) {
            CHECK(gx1[v].norm() < 0.02);
        }
    }
}

TEST_CASE("project_tangential: kills normals, idempotent, keeps tangents") {
    SurfaceMesh m = icosphere(3, 1.0);
    auto killed = project_tangential(m, m.vertex_normals);
    for (const Vec3& v : killed) CHECK(v.norm() < 1e-14);

    std::vector<Vec3> mixed(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) {
        mixed[v] = Vec3(0.3, -1.2, 0.5) + 0.7 * m.vertex_normals[v];
    }
    auto once = project_tangential(m, mixed);
    auto twice = project_tangential(m, once);
    for (int v = 0; v < m.vertex_count(); ++v) {
        CHECK((once[v] - twice[v]).norm() < 1e-14);
        CHECK(std::abs(once[v].dot(m.vertex_normals[v])) < 1e-13);
    }
}

TEST_CASE("boundary_integral: area, odd moment, second moment") {
    SurfaceMesh m = icosphere(4, 1.0);
    std::vector<double> ones(m.vertex_count(), 1.0);
    CHECK(boundary_integral(m, ones) == doctest::Approx(4.0 * M_PI).epsilon(0.005));

    std::vector<double> x3(m.vertex_count()), x3sq(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) {
        x3[v] = m.vertices[v][2];
        x3sq[v] = x3[v] * x3[v];
    }
    CHECK(std::abs(boundary_integral(m, x3)) < 1e-3);
    CHECK(boundary_integral(m, x3sq) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(0.01));
}

TEST_CASE("scaling laws are exact across the estimator chain") {
    SurfaceMesh base = icosphere(3, 1.0);
    CurvatureData c0 = second_fundamental_form(base);
    double i0 = injectivity_radius(base, c0, 100.0);
    std::vector<double> ones0(base.vertex_count(), 1.0);
    double area0 = boundary_integral(base, ones0);

    for (double lam : {0.5, 2.0, 3.0}) {
        auto verts = base.vertices;
        for (auto& v : verts) v *= lam;
        SurfaceMesh scaled = build_surface(verts, base.faces);
        CurvatureData cs = second_fundamental_form(scaled);
        for (int v = 0; v < base.vertex_count(); ++v) {
            CHECK(std::abs(cs.principal[v].first - c0.principal[v].first / lam) <
                  1e-10 * std::abs(c0.principal[v].first / lam));
            CHECK(std::abs(cs.principal[v].second - c0.principal[v].second / lam) <
                  1e-10 * std::abs(c0.principal[v].second / lam));
        }
        double is = injectivity_radius(scaled, cs, 100.0 * lam);
        CHECK(std::abs(is - lam * i0) < 1e-10 * lam * i0);
        std::vector<double> ones(scaled.vertex_count(), 1.0);
        CHECK(std::abs(boundary_integral(scaled, ones) - lam * lam * area0) <
              1e-10 * lam * lam * area0);
    }
}

TEST_CASE("K_geom is invariant under rigid motions") {
    SurfaceMesh base = ellipsoid(3, 1.5, 1.0, 0.8);
    CurvatureData c0 = second_fundamental_form(base);
    double k0 = c0.theta_sup + 1.0 / injectivity_radius(base, c0, 100.0);

    Eigen::AngleAxisd rot(0.83, Vec3(1.0, 2.0, -0.5).normalized());
    Vec3 shift(0.3, -1.1, 2.0);
    auto verts = base.vertices;
    for (auto& v : verts) v = rot * v + shift;
    SurfaceMesh moved = build_surface(verts, base.faces);
    CurvatureData c1 = second_fundamental_form(moved);
    double k1 = c1.theta_sup + 1.0 / injectivity_radius(moved, c1, 100.0);
    CHECK(std::abs(k1 - k0) < 1e-9 * k0);
}

TEST_CASE("OFF round trip preserves geometry") {
    namespace fs = std::filesystem;
    SurfaceMesh m = perturbed_sphere(3, 1.0, {{2, 2, 0.05}});
    fs::path p = fs::temp_directory_path() / "fbeuler_test_mesh.off";
    write_off(p.string(), m);
    SurfaceMesh r = read_off(p.string());
    REQUIRE(r.vertex_count() == m.vertex_count());
    REQUIRE(r.face_count() == m.face_count());
    for (int v = 0; v < m.vertex_count(); ++v) {
        CHECK((r.vertices[v] - m.vertices[v]).norm() == 0.0);  // 17 digits round-trips
    }
    fs::remove(p);
}

TEST_CASE("solid harmonics are harmonic polynomials") {
    for (int l = 0; l <= 4; ++l) {
        for (int m = -l; m <= l; ++m) {
            CHECK(solid_harmonic_poly(l, m).laplacian().is_zero(1e-12));
        }
    }
    // spot value: Y_00 = 1/sqrt(4 pi)
    CHECK(real_sph_harmonic(0, 0, Vec3(0.3, -2.0, 1.0)) ==
          doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-12));
}
