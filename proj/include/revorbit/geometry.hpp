#pragma once

#include "revorbit/expr.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revorbit {

enum class SurfaceClass { Spherical, Hyperboloidal, Toroidal, Paraboloidal };

std::string_view to_string(SurfaceClass c);

/// Closed ends belong to the domain (poles where f = 0, or a user-given
/// boundary); open ends are clipping boundaries the particle can not cross.
enum class EndKind { Closed, Open, Infinite };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    EndKind lo_kind = EndKind::Closed;
    EndKind hi_kind = EndKind::Closed;

    bool contains(double u) const;
    bool interior(double u) const { return u > lo && u < hi; }
    bool finite() const { return lo_kind != EndKind::Infinite && hi_kind != EndKind::Infinite; }
};

/// A profile f(u) together with its first three derivatives, all obtained by
/// differentiating the expression tree.
class Profile {
public:
    Profile() = default;
    explicit Profile(expr::Expr f);

    double f(double u) const { return expr::eval(d_[0], u); }
    double df(double u) const { return expr::eval(d_[1], u); }
    double d2f(double u) const { return expr::eval(d_[2], u); }
    double d3f(double u) const { return expr::eval(d_[3], u); }

    const expr::Expr& tree(int order) const { return d_[order]; }

private:
    expr::Expr d_[4];
};

/// Parses an expression in u and differentiates it symbolically.
Profile parse_profile(std::string_view text);

struct ThetaSpec {
    double u_ref = 0.0;
    double constant = 0.0;
};

/// Surface of revolution x(u, φ) = (f(u) cos φ, f(u) sin φ, g(u)) with a
/// unit-speed profile. Immutable once built.
class Surface {
public:
    Surface(Profile profile, Interval domain, SurfaceClass cls, std::optional<double> b_squared,
            ThetaSpec theta, double g_ref, std::string label);

    /// Attaches an explicit height function g(u), used instead of the
    /// quadrature when the profile's g' changes sign (closed loops).
    Surface with_height(expr::Expr g) const;

    double f(double u) const { return profile_.f(u); }
    double df(double u) const { return profile_.df(u); }
    double d2f(double u) const { return profile_.d2f(u); }
    double d3f(double u) const { return profile_.d3f(u); }

    const Profile& profile() const { return profile_; }
    const Interval& domain() const { return domain_; }
    SurfaceClass surface_class() const { return class_; }
    /// Constant value of h(u) = -f f'' + f'^2 when the surface has one.
    const std::optional<double>& b_squared() const { return b_squared_; }
    /// True when Θ is the closed form -f'/(b² f), i.e. b² is known and nonzero.
    bool theta_closed_form() const;
    const ThetaSpec& theta_spec() const { return theta_; }
    double g_ref() const { return g_ref_; }
    const std::string& label() const { return label_; }
    const std::optional<expr::Expr>& height() const { return height_; }
    bool pole_at_lo() const { return pole_lo_; }
    bool pole_at_hi() const { return pole_hi_; }

    /// Finite window used for grids: the domain with infinite ends
    /// truncated at distance `reach` from the other end or from 0.
    Interval sampling_window(double reach = 20.0) const;

    /// n points strictly inside the sampling window, cell centred.
    std::vector<double> interior_grid(int n) const;

    /// Throws DomainError when u is outside the domain, SingularPoint when f(u) = 0.
    void require_regular(double u) const;

private:
    Profile profile_;
    Interval domain_;
    SurfaceClass class_;
    std::optional<double> b_squared_;
    ThetaSpec theta_;
    double g_ref_;
    std::string label_;
    std::optional<expr::Expr> height_;
    bool pole_lo_ = false;
    bool pole_hi_ = false;
};

struct EmbeddedPoint {
    double x = 0.0, y = 0.0, z = 0.0;
};

double gaussian_curvature(const Surface& s, double u);

/// h(u) = -f f'' + (f')².
double h_function(const Surface& s, double u);

/// h'(u) = f' f'' - f f'''.
double h_derivative(const Surface& s, double u);

/// Antiderivative of 1/f². Closed form -f'/(b² f) on surfaces with constant
/// nonzero h, quadrature from theta_spec().u_ref otherwise.
double theta(const Surface& s, double u);

/// Inverse of the strictly increasing Θ; throws RangeError when the value is
/// not attained inside the domain.
double theta_inverse(const Surface& s, double value);

/// g(u) = sign · ∫_{g_ref}^{u} sqrt(1 - f'(s)²) ds. Throws NonEmbeddable when
/// f'² > 1 on the path.
double profile_g(const Surface& s, double u, int sign = +1);

EmbeddedPoint embed(const Surface& s, double u, double phi);

/// K > 0: f = C1 cos(√K u) + C2 sin(√K u),   b² = K (C1² + C2²)
/// K < 0: f = C1 exp(√-K u) + C2 exp(-√-K u), b² = 4 K C1 C2
/// K = 0: f = C1 u + C2,                      b² = C1²
/// The domain is the maximal interval with f > 0 and f'² <= 1.
Surface make_constant_curvature(double K, double C1, double C2);

/// Unit-speed torus profile f = R + r cos(u/r) on [0, 2πr].
Surface make_torus(double R, double r);

struct CustomSurfaceOptions {
    std::optional<double> theta_ref;
    double theta_constant = 0.0;
};

/// Surface from an expression. Infinite ends are allowed. The domain is
/// clipped to the maximal interval around the Θ reference point where f > 0
/// and f'² <= 1.
Surface make_custom(std::string_view f_expr, double c, double d, const CustomSurfaceOptions& opts = {});

struct HConstancy {
    bool constant = false;
    double mean = 0.0;
    double spread = 0.0; // max - min over the sample
};

/// Constancy of h over a uniform grid plus seeded random points, with
/// max - min <= tol (1 + |mean|).
HConstancy h_constancy(const Surface& s, int n_grid = 512, int n_random = 512, double tol = 1e-9,
                       std::uint64_t seed = 1);

} // namespace revorbit
