#pragma once

#include "revorbit/geometry.hpp"
#include "revorbit/potentials.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace revorbit {

struct SurfaceSpec {
    std::string kind = "constant_curvature"; // constant_curvature | torus | custom
    std::string label;
    double K = 1.0, C1 = 0.0, C2 = 1.0;
    double R = 2.0, r = 1.0;
    std::string f_expr;
    double c = 0.0, d = 0.0; // custom domain; ±infinity allowed
    std::optional<double> theta_ref;
    double theta_const = 0.0;

    bool operator==(const SurfaceSpec&) const = default;
};

struct PotentialSpec {
    std::string kind = "gravitational"; // gravitational | harmonic | custom
    double a = 1.0;
    double k = 1.0;
    std::string V_expr;

    bool operator==(const PotentialSpec&) const = default;
};

struct InitialSpec {
    double u = 0.0, phi = 0.0, p_u = 0.0, p_phi = 0.0, m = 1.0;

    bool operator==(const InitialSpec&) const = default;
};

/// Orbit given by its conserved quantities; the run starts at the inner
/// turning point with p_u = 0, or on the circular orbit.
struct OrbitSpec {
    std::optional<double> E;
    double l = 1.0;
    double m = 1.0;
    bool circular = false;

    bool operator==(const OrbitSpec&) const = default;
};

struct IntegratorSpec {
    double dt = 1e-3;
    long n_steps = 100000;
    std::optional<double> periods; // when set, dt = periods * T_radial / n_steps

    bool operator==(const IntegratorSpec&) const = default;
};

struct AnalysisSpec {
    long q_max = 64;
    double closure_tol = 1e-9;
    int n_energies = 10;
    std::vector<double> energies;

    bool operator==(const AnalysisSpec&) const = default;
};

struct OutputSpec {
    bool embed = false;

    bool operator==(const OutputSpec&) const = default;
};

/// Initial point of a planar run (r, ψ, dr/dτ, dψ/dτ) for the projection check.
struct PlanarSpec {
    double r = 1.0, psi = 0.0, dr = 0.0, dpsi = 1.0, m = 1.0;

    bool operator==(const PlanarSpec&) const = default;
};

struct RunConfig {
    std::optional<SurfaceSpec> surface;
    std::optional<PotentialSpec> potential;
    std::optional<InitialSpec> initial;
    std::optional<OrbitSpec> orbit;
    IntegratorSpec integrator;
    AnalysisSpec analysis;
    OutputSpec output;
    std::vector<SurfaceSpec> surfaces;
    std::optional<PlanarSpec> planar;

    bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError on malformed JSON, unknown kinds or invalid values.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const SurfaceSpec& spec);

std::shared_ptr<const Surface> build_surface(const SurfaceSpec& spec);
CentralPotential build_potential(const PotentialSpec& spec, std::shared_ptr<const Surface> s);

} // namespace revorbit
