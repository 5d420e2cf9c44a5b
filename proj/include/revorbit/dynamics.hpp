#pragma once

#include "revorbit/geometry.hpp"
#include "revorbit/potentials.hpp"

#include <optional>
#include <span>
#include <vector>

namespace revorbit {

/// Full Hamiltonian state (u, φ, p_u, p_φ) of a particle of mass m at time t.
struct PhaseState {
    double t = 0.0;
    double u = 0.0;
    double phi = 0.0;
    double p_u = 0.0;
    double p_phi = 0.0;
    double m = 1.0;
};

struct StateDerivative {
    double du = 0.0;
    double dphi = 0.0;
    double dp_u = 0.0;
    double dp_phi = 0.0;
};

/// The integration reached the domain boundary (or a collision with a pole)
/// at time t. A recorded outcome, not an error.
struct SingularEnd {
    double t = 0.0;
    double u = 0.0;
};

struct Trajectory {
    std::vector<PhaseState> samples;
    double E0 = 0.0;
    double l = 0.0;
    std::vector<double> drift_log; // |H - E0| per sample
    std::optional<SingularEnd> singular_end;

    double drift_max() const;
};

/// Point of the planar central problem in polar coordinates.
struct PlanarState {
    double tau = 0.0;
    double r = 0.0;
    double psi = 0.0;
    double dr = 0.0;   // dr/dτ
    double dpsi = 0.0; // dψ/dτ
};

/// H = p_u²/2m + p_φ²/(2 m f²) + V(u).
double hamiltonian(const PhaseState& state, const Surface& s, const CentralPotential& p);

StateDerivative eom(const PhaseState& state, const Surface& s, const CentralPotential& p);

/// Leapfrog on the reduced radial system H_r = p_u²/2m + W(u) with p_φ held
/// fixed; φ advances by l/(m f(u_mid)²) dt per step. Stops early with a
/// SingularEnd when the domain boundary is reached. Throws StepTooLarge when
/// the energy jumps by more than 1e-3 of the initial energy scale in one step.
/// Toroidal surfaces wrap u periodically.
Trajectory integrate(const Surface& s, const CentralPotential& p, const PhaseState& init, double dt, long n_steps);

/// Planar trajectory read off an integration on the plane f(u) = u.
std::vector<PlanarState> planar_from_plane_run(const Trajectory& plane_run);

/// Central projection r = -1/Θ(u), φ = ψ, dτ = (f Θ)⁻² dt of a planar
/// trajectory onto a surface with h ≡ 1. Momenta follow from
/// du/dt = dr/dτ and p_φ = m r² dψ/dτ.
Trajectory appell_map(const Surface& s, std::span<const PlanarState> planar, double m = 1.0);

} // namespace revorbit
