#include "fbeuler/scenario_io.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace fbeuler {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!required.count(key) && !optional.count(key)) {
            throw ConfigError("unknown key \"" + key + "\" in " + where);
        }
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) {
            throw ConfigError("missing key \"" + key + "\" in " + where);
        }
    }
}

Vec3 parse_vec3(const json& a, const std::string& where) {
    if (!a.is_array() || a.size() != 3) throw ConfigError(where + " must be a 3-array");
    return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

Polynomial parse_polynomial(const json& a, const std::string& where) {
    if (!a.is_array()) throw ConfigError(where + " must be an array of [coeff,px,py,pz]");
    std::vector<Monomial> terms;
    for (const auto& t : a) {
        if (!t.is_array() || t.size() != 4) {
            throw ConfigError(where + " entries must be [coeff, px, py, pz]");
        }
        terms.push_back({t[0].get<double>(), t[1].get<int>(), t[2].get<int>(), t[3].get<int>()});
    }
    return Polynomial(std::move(terms));
}

SurfaceSpec parse_surface(const json& s) {
    require_keys(s, "surface", {"kind", "params"});
    SurfaceSpec spec;
    std::string kind = s["kind"].get<std::string>();
    const json& p = s["params"];
    if (kind == "sphere") {
        spec.kind = SurfaceSpec::Kind::Sphere;
        require_keys(p, "surface.params", {"radius"});
        spec.radius = p["radius"].get<double>();
    } else if (kind == "ellipsoid") {
        spec.kind = SurfaceSpec::Kind::Ellipsoid;
        require_keys(p, "surface.params", {"a", "b", "c"});
        spec.a = p["a"].get<double>();
        spec.b = p["b"].get<double>();
        spec.c = p["c"].get<double>();
    } else if (kind == "perturbed_sphere") {
        spec.kind = SurfaceSpec::Kind::PerturbedSphere;
        require_keys(p, "surface.params", {"radius", "bumps"});
        spec.radius = p["radius"].get<double>();
        for (const auto& b : p["bumps"]) {
            if (!b.is_array() || b.size() != 3) {
                throw ConfigError("surface.params.bumps entries must be [l, m, amplitude]");
            }
            spec.bumps.push_back({b[0].get<int>(), b[1].get<int>(), b[2].get<double>()});
        }
    } else {
        throw ConfigError("unknown surface kind \"" + kind + "\"");
    }
    return spec;
}

VelocitySpec parse_velocity(const json& v) {
    require_keys(v, "velocity", {"kind", "params"});
    VelocitySpec spec;
    std::string kind = v["kind"].get<std::string>();
    const json& p = v["params"];
    if (kind == "zero") {
        spec.kind = VelocitySpec::Kind::Zero;
        require_keys(p, "velocity.params", {});
    } else if (kind == "rigid_rotation") {
        spec.kind = VelocitySpec::Kind::RigidRotation;
        require_keys(p, "velocity.params", {"omega"});
        spec.rotation = parse_vec3(p["omega"], "velocity.params.omega");
    } else if (kind == "linear_strain") {
        spec.kind = VelocitySpec::Kind::LinearStrain;
        require_keys(p, "velocity.params", {"matrix"});
        const json& m = p["matrix"];
        if (!m.is_array() || m.size() != 3) {
            throw ConfigError("velocity.params.matrix must be a 3x3 array");
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) spec.strain(i, j) = m[i][j].get<double>();
        }
    } else if (kind == "harmonic_gradient") {
        spec.kind = VelocitySpec::Kind::HarmonicGradient;
        require_keys(p, "velocity.params", {"potential"});
        spec.potential = parse_polynomial(p["potential"], "velocity.params.potential");
    } else if (kind == "dipole") {
        spec.kind = VelocitySpec::Kind::Dipole;
        require_keys(p, "velocity.params", {"moment", "center"});
        spec.dipole_moment = parse_vec3(p["moment"], "velocity.params.moment");
        spec.dipole_center = parse_vec3(p["center"], "velocity.params.center");
    } else if (kind == "polynomial") {
        spec.kind = VelocitySpec::Kind::Polynomial;
        require_keys(p, "velocity.params", {"x", "y", "z"});
        spec.poly.x = parse_polynomial(p["x"], "velocity.params.x");
        spec.poly.y = parse_polynomial(p["y"], "velocity.params.y");
        spec.poly.z = parse_polynomial(p["z"], "velocity.params.z");
    } else {
        throw ConfigError("unknown velocity kind \"" + kind + "\"");
    }
    return spec;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
    }
    require_keys(doc, "scenario",
                 {"schema", "name", "surface", "velocity", "grid", "bem", "time", "events"},
                 {"seed"});
    if (doc["schema"].get<int>() != 1) {
        throw ConfigError("unsupported scenario schema (expected 1)");
    }

    Scenario s;
    s.name = doc["name"].get<std::string>();
    s.surface = parse_surface(doc["surface"]);
    s.velocity = parse_velocity(doc["velocity"]);

    require_keys(doc["grid"], "grid", {"h"});
    s.h = doc["grid"]["h"].get<double>();
    require_keys(doc["bem"], "bem", {"subdiv"});
    s.subdiv = doc["bem"]["subdiv"].get<int>();
    require_keys(doc["time"], "time", {"dt", "t_end", "snapshot_every"});
    s.dt = doc["time"]["dt"].get<double>();
    s.t_end = doc["time"]["t_end"].get<double>();
    s.snapshot_every = doc["time"]["snapshot_every"].get<int>();
    require_keys(doc["events"], "events", {"K_max", "taylor_min", "quality_floor"});
    s.events.K_max = doc["events"]["K_max"].get<double>();
    s.events.taylor_min = doc["events"]["taylor_min"].get<double>();
    s.events.quality_floor = doc["events"]["quality_floor"].get<double>();
    if (doc.contains("seed")) s.seed = doc["seed"].get<unsigned>();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open scenario file " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse_scenario(text);
}

} // namespace fbeuler
