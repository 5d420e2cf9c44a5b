#pragma once

#include "revorbit/dynamics.hpp"
#include "revorbit/geometry.hpp"
#include "revorbit/potentials.hpp"
#include "revorbit/rational.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace revorbit {

/// W(u) = l²/(2 m f²) + V(u), the radial potential once φ is eliminated.
class EffectiveProfile {
public:
    EffectiveProfile(std::shared_ptr<const Surface> s, CentralPotential p, double l, double m = 1.0);

    double W(double u) const;
    double dW(double u) const;
    double d2W(double u) const;

    const Surface& surface() const { return *surface_; }
    const std::shared_ptr<const Surface>& surface_ptr() const { return surface_; }
    const CentralPotential& potential() const { return potential_; }
    double l() const { return l_; }
    double m() const { return m_; }

private:
    std::shared_ptr<const Surface> surface_;
    CentralPotential potential_;
    double l_;
    double m_;
};

EffectiveProfile effective_potential(std::shared_ptr<const Surface> s, const CentralPotential& p, double l,
                                     double m = 1.0);

enum class CriticalType { Minimum, Maximum, Degenerate };

std::string_view to_string(CriticalType t);

struct CircularOrbit {
    double u0 = 0.0;
    double l = 0.0;
    double E = 0.0;
    CriticalType type = CriticalType::Degenerate;
};

/// Roots of W' located by a sign-change scan over the sampling window and
/// bisection to 1e-12. Sign changes across poles of W' are discarded. An
/// empty result means there is no critical point.
std::vector<CircularOrbit> circular_orbits(const EffectiveProfile& w, int n_cells = 2048);

/// First minimum of W; throws NoCriticalPoint when there is none.
CircularOrbit stable_circular_orbit(const EffectiveProfile& w, int n_cells = 2048);

/// l² = m f³ V' / f' at u0. Throws DegenerateCircular when f'(u0) = 0 and
/// RangeError when the right side is negative.
double circular_l_squared(const Surface& s, const CentralPotential& p, double u0, double m = 1.0);

struct TurningPoints {
    double u1 = 0.0;
    double u2 = 0.0;
};

/// Roots of W = E on either side of the minimum at u0 (the first minimum when
/// not given). Throws Unbound when one side has no barrier below the domain
/// boundary.
TurningPoints turning_points(const EffectiveProfile& w, double E, std::optional<double> u0 = std::nullopt);

struct ApsidalResult {
    double E = 0.0;
    double l = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double delta_phi = 0.0;
    double beta = 0.0;
    double period = 0.0; // radial period in t
    std::optional<Rational> closure;
};

struct ApsidalOptions {
    double closure_tol = 1e-9;
    long q_max = 64;
    double abs_tol = 1e-10;    // quadrature target
    double accept_tol = 1e-8;  // largest error estimate accepted, relative to max(1, |I|)
};

/// Δφ = 2 ∫ l/(m f²) du / sqrt((2/m)(E - W)) between the turning points, with
/// u = u1 + (u2 - u1) sin²θ removing the endpoint singularities.
ApsidalResult apsidal_angle(const EffectiveProfile& w, double E, std::optional<double> u0 = std::nullopt,
                            const ApsidalOptions& opts = {});

/// Energies W₀ + 0.9 H 10^(-4 + 4 i/(n-1)), i = 0..n-1, with H the height of
/// the lower of the two barriers around u0. When both sides rise without
/// bound H is max(1, |W₀|).
std::vector<double> energy_grid(const EffectiveProfile& w, const CircularOrbit& c, int n = 10);

/// Max over E of | ∫_{u1}^{u2} ds/f² - 2 sqrt(2m) sqrt(E - W₀) / (l β) |.
double abel_identity_check(const EffectiveProfile& w, const CircularOrbit& c, double beta,
                           const std::vector<double>& energies);

/// V''/V' - (β² - 3 f'²)/(f' f) - f''/f' at u0.
double first_order_condition_residual(const Surface& s, const CentralPotential& p, double u0, double beta);

/// β² solving the first-order condition at u0.
double first_order_beta_squared(const Surface& s, const CentralPotential& p, double u0);

/// Roots of z² - 5 h z + 4 h² + 3 f f' h' = 0 in z = β². z1 <= z2 when real;
/// complex roots carry the shared real part and imag > 0.
struct QuarticRoots {
    double z1 = 0.0;
    double z2 = 0.0;
    double imag = 0.0;
    bool real = true;
};

QuarticRoots beta_quartic(const Surface& s, double u);

enum class BertrandVerdict { TwoPotentials, OnePotential, None, Degenerate };

std::string_view to_string(BertrandVerdict v);

struct QuarticSample {
    double u = 0.0;
    QuarticRoots roots;
};

struct BertrandReport {
    std::string label;
    bool h_constant = false;
    std::optional<double> b_squared;
    double h_spread = 0.0;
    std::vector<QuarticSample> roots;
    std::vector<double> constant_roots;
    std::vector<std::string> admissible; // "V1", "V2"
    std::vector<double> beta;
    std::vector<Rational> rational;
    std::vector<bool> rational_flag; // residual within closure tolerance
    std::array<double, 2> root_spread{0.0, 0.0};
    BertrandVerdict verdict = BertrandVerdict::None;
};

struct BertrandOptions {
    int n_grid = 1024;
    double tol = 1e-9;
    double closure_tol = 1e-9;
    long q_max = 64;
};

BertrandReport bertrand_classify(const Surface& s, const BertrandOptions& opts = {});

/// ρ(φ) = (1 + e cos(b(φ - φ₀)))/p with p = b² l²/(a m), and u(φ) = Θ⁻¹(-ρ).
class GravitationalOrbit {
public:
    GravitationalOrbit(std::shared_ptr<const Surface> s, double a, double l, double m, double e, double phi0);

    double rho(double phi) const;
    double u(double phi) const;
    double semi_latus() const { return p_; }
    double b() const { return b_; }

private:
    std::shared_ptr<const Surface> surface_;
    double e_, phi0_, b_, p_;
};

/// ρ²(φ) = h_int/b² + η cos(2b(φ - φ₀)), η² = h_int²/b⁴ - 2 k m/(l² b²).
/// Throws ComplexEta when η² < 0.
class HarmonicOrbit {
public:
    HarmonicOrbit(std::shared_ptr<const Surface> s, double k, double l, double m, double h_int, double phi0);

    double rho_squared(double phi) const;
    double rho(double phi) const;
    double u(double phi) const;
    double eta() const { return eta_; }
    double b() const { return b_; }

private:
    std::shared_ptr<const Surface> surface_;
    double h_int_, phi0_, b_, eta_;
};

/// Max over an n-point φ grid on [phi_lo, phi_hi] of
/// |ρ'' + b² ρ - (m/l²) f(u)² V'(u)| with u = Θ⁻¹(-ρ), ρ'' from
/// Richardson-extrapolated central differences with base step h.
double trajectory_equation_residual(const Surface& s, const CentralPotential& p, double l, double m,
                                    const std::function<double(double)>& rho, double phi_lo, double phi_hi,
                                    int n = 400, double h = 1e-3);

/// W'', W''' and W'''' at a circular orbit from their closed forms in V', f
/// and β against Richardson finite differences of W; relative residuals.
std::array<double, 3> w_derivative_identities_check(const EffectiveProfile& w, const CircularOrbit& c,
                                                    double beta);

struct MeasuredApsides {
    double delta_phi = 0.0; // mean φ advance per radial period
    double period = 0.0;    // mean radial period
    int periods = 0;
};

/// φ advance between successive upward zero crossings of p_u, linearly
/// interpolated. Empty when fewer than two crossings occur.
std::optional<MeasuredApsides> measured_apsidal_angle(const Trajectory& traj);

/// Max over samples of b with φ inside the range of a of |u_b(φ) - u_a(φ)|,
/// with u_a linearly interpolated in φ. Both traces must have monotone φ.
double max_trace_deviation(const Trajectory& a, const Trajectory& b);

} // namespace revorbit
