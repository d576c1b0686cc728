#pragma once

#include <optional>
#include <string>

#include "fbeuler/diagnostics.hpp"
#include "fbeuler/mesh_gen.hpp"
#include "fbeuler/polynomial.hpp"

namespace fbeuler {

struct SurfaceSpec {
    enum class Kind { Sphere, Ellipsoid, PerturbedSphere };
    Kind kind = Kind::Sphere;
    double radius = 1.0;                // sphere / perturbed sphere
    double a = 1.0, b = 1.0, c = 1.0;   // ellipsoid semi-axes
    std::vector<HarmonicBump> bumps;    // perturbed sphere
};

struct VelocitySpec {
    enum class Kind { Zero, RigidRotation, LinearStrain, HarmonicGradient, Dipole, Polynomial };
    Kind kind = Kind::Zero;
    Vec3 rotation = Vec3::Zero();        // angular velocity vector
    Mat3 strain = Mat3::Zero();          // trace-free velocity gradient
    Polynomial potential;                // harmonic potential, u = grad phi
    Vec3 dipole_moment = Vec3::Zero();
    Vec3 dipole_center = Vec3(0, 0, 3);  // must lie outside the fluid
    PolyVectorField poly;                // general divergence-free polynomial
};

struct EventThresholds {
    double K_max = 1e30;
    double taylor_min = -1e30;
    double quality_floor = 0.15;
};

/// Declarative initial condition plus run parameters.
struct Scenario {
    std::string name;
    SurfaceSpec surface;
    VelocitySpec velocity;
    double h = 0.05;          // grid spacing
    int subdiv = 3;           // icosphere subdivision of the boundary mesh
    double dt = 0.01;
    double t_end = 0.1;
    int snapshot_every = 1;
    EventThresholds events;
    unsigned seed = 42;
};

/// Analytic velocity/vorticity evaluators; construction validates that the
/// spec is divergence-free (exactly, at the symbol level where polynomial).
struct VelocityModel {
    std::function<Vec3(const Vec3&)> velocity;
    std::function<Vec3(const Vec3&)> vorticity;
};
VelocityModel make_velocity_model(const VelocitySpec& spec);

SurfaceMesh make_surface(const SurfaceSpec& spec, int subdiv);

/// Builds the mesh and sampling and samples the analytic fields.
FlowState init_scenario(const Scenario& s);

struct StepReport {
    double u_sup = 0.0;
    double div_sup = 0.0;
    double quality_min = 1.0;
};

/// One classical RK4 step of the Lagrangian marker system: boundary vertices
/// move with their velocity and accelerate with -grad_N p N; interior grid
/// markers move with the flow and accelerate with -grad p; the vorticity is
/// advanced by the stretching identity. Pressure is re-solved on the stage
/// geometry at every stage; afterwards the surface and sampling are rebuilt
/// and the fields resampled semi-Lagrangianly onto the new grid.
/// Throws CFLViolation when dt > 0.5 h / ||u||_sup and MeshQualityFailure
/// when the stepped mesh drops below the quality floor.
///
/// stabilize engages the boundary-velocity conditioning (vertex-scale
/// normal-mode filter plus global volume-flux projection) that production
/// runs need on Hadamard-unstable states; it is deliberately dissipative,
/// so reversibility studies of the bare integrator switch it off.
std::pair<FlowState, StepReport> step_rk4(const FlowState& state, double dt,
                                          double quality_floor = 0.0,
                                          bool stabilize = true);

struct Trajectory {
    std::vector<FlowState> snapshots;
    std::vector<int> snapshot_steps;
    std::vector<DiagnosticsRecord> records;
    std::string termination;  // completed | taylor_sign | K_max | mesh_quality | solver_failure | cfl
};

/// Advances the scenario, recording the full diagnostics after every step
/// and terminating at t_end or on a monitored event. Failures become
/// termination reasons; the partial trajectory is always returned.
Trajectory run(const Scenario& s);

/// max |vol(t) - vol(0)| / vol(0) over the records.
double volume_drift(const Trajectory& traj);

/// Relative L2 difference between the transported vorticity and curl u.
double vorticity_consistency(const FlowState& state);

} // namespace fbeuler
