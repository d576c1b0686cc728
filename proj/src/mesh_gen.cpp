#include "fbeuler/mesh_gen.hpp"

#include <cmath>
#include <map>

#include "fbeuler/spherical_harmonics.hpp"

namespace fbeuler {

namespace {

struct IcoBuilder {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;
    std::map<std::pair<int, int>, int> midpoint_cache;

    int midpoint(int a, int b) {
        auto k = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = midpoint_cache.find(k);
        if (it != midpoint_cache.end()) return it->second;
        Vec3 m = ((verts[a] + verts[b]) * 0.5).normalized();
        verts.push_back(m);
        int idx = static_cast<int>(verts.size()) - 1;
        midpoint_cache.emplace(k, idx);
        return idx;
    }
};

} // namespace

SurfaceMesh icosphere(int subdiv, double radius, const Vec3& center) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    IcoBuilder b;
    auto add = [&](double x, double y, double z) {
        b.verts.push_back(Vec3(x, y, z).normalized());
    };
    add(-1, phi, 0); add(1, phi, 0); add(-1, -phi, 0); add(1, -phi, 0);
    add(0, -1, phi); add(0, 1, phi); add(0, -1, -phi); add(0, 1, -phi);
    add(phi, 0, -1); add(phi, 0, 1); add(-phi, 0, -1); add(-phi, 0, 1);
    b.faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

    for (int s = 0; s < subdiv; ++s) {
        std::vector<std::array<int, 3>> next;
        next.reserve(b.faces.size() * 4);
        for (const auto& t : b.faces) {
            int ab = b.midpoint(t[0], t[1]);
            int bc = b.midpoint(t[1], t[2]);
            int ca = b.midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        b.faces = std::move(next);
    }

    for (auto& v : b.verts) v = center + radius * v;
    return build_surface(std::move(b.verts), std::move(b.faces));
}

SurfaceMesh ellipsoid(int subdiv, double a, double b, double c) {
    SurfaceMesh unit = icosphere(subdiv, 1.0);
    for (auto& v : unit.vertices) {
        v[0] *= a;
        v[1] *= b;
        v[2] *= c;
    }
    return build_surface(std::move(unit.vertices), std::move(unit.faces));
}

SurfaceMesh perturbed_sphere(int subdiv, double radius,
                             const std::vector<HarmonicBump>& bumps) {
    SurfaceMesh unit = icosphere(subdiv, 1.0);
    for (auto& v : unit.vertices) {
        Vec3 dir = v.normalized();
        double r = 1.0;
        for (const auto& bump : bumps) {
            r += bump.amplitude * real_sph_harmonic(bump.l, bump.m, dir);
        }
        v = radius * r * dir;
    }
    return build_surface(std::move(unit.vertices), std::move(unit.faces));
}

SurfaceMesh surface_of_revolution(const std::function<double(double)>& profile,
                                  double z_min, double z_max,
                                  int n_z, int n_theta) {
    if (n_z < 3 || n_theta < 3) throw Error("surface_of_revolution: grid too small");
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;

    // cosine-clustered stations resolve the poles
    std::vector<double> stations(n_z);
    for (int i = 0; i < n_z; ++i) {
        double s = 0.5 * (1.0 - std::cos(M_PI * (i + 1) / (n_z + 1)));
        stations[i] = z_min + (z_max - z_min) * s;
    }

    int south = 0;
    verts.push_back(Vec3(0, 0, z_min));
    std::vector<int> prev_ring;
    for (int i = 0; i < n_z; ++i) {
        double rho = profile(stations[i]);
        if (!(rho > 0.0)) throw Error("surface_of_revolution: profile must be positive inside");
        std::vector<int> ring(n_theta);
        for (int j = 0; j < n_theta; ++j) {
            double th = 2.0 * M_PI * j / n_theta;
            ring[j] = static_cast<int>(verts.size());
            verts.push_back(Vec3(rho * std::cos(th), rho * std::sin(th), stations[i]));
        }
        if (i == 0) {
            for (int j = 0; j < n_theta; ++j) {
                faces.push_back({south, ring[(j + 1) % n_theta], ring[j]});
            }
        } else {
            for (int j = 0; j < n_theta; ++j) {
                int j1 = (j + 1) % n_theta;
                faces.push_back({prev_ring[j], prev_ring[j1], ring[j]});
                faces.push_back({prev_ring[j1], ring[j1], ring[j]});
            }
        }
        prev_ring = ring;
    }
    int north = static_cast<int>(verts.size());
    verts.push_back(Vec3(0, 0, z_max));
    for (int j = 0; j < n_theta; ++j) {
        faces.push_back({north, prev_ring[j], prev_ring[(j + 1) % n_theta]});
    }
    return build_surface(std::move(verts), std::move(faces));
}

SurfaceMesh dumbbell(double neck_radius, double separation, int n_z, int n_theta) {
    const double z0 = separation;
    const double rho_sq_0 = neck_radius * neck_radius;
    // hyperboloid slope chosen so neck^2 meets the sphere profile at
    // |z| = z_join; beyond the join the neck is ramped down so the sphere
    // caps dominate all the way to the poles
    const double z_join = std::max(0.3, z0 - 0.95);
    const double sphere_sq_join = 1.0 - (z_join - z0) * (z_join - z0);
    const double lambda = std::max(0.02, (sphere_sq_join - rho_sq_0) / (z_join * z_join));
    const double ramp = 3.0 * (1.0 + lambda);
    const double blend = 0.02;  // smooth-max width; sets the crotch curvature

    auto smax = [](double a, double b, double k) {
        return 0.5 * (a + b + std::sqrt((a - b) * (a - b) + k * k));
    };
    auto profile = [=](double z) {
        double s1 = 1.0 - (z - z0) * (z - z0);
        double s2 = 1.0 - (z + z0) * (z + z0);
        double over = std::max(0.0, std::abs(z) - z_join);
        double neck = rho_sq_0 + lambda * z * z - ramp * over * over;
        double q = smax(smax(s1, s2, 1e-3), neck, blend);
        return std::sqrt(std::max(q, 1e-12));
    };
    return surface_of_revolution(profile, -(z0 + 1.0), z0 + 1.0, n_z, n_theta);
}

} // namespace fbeuler
