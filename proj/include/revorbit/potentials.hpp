#pragma once

#include "revorbit/expr.hpp"
#include "revorbit/geometry.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace revorbit {

enum class PotentialKind { Gravitational, Harmonic, Custom };

/// Central potential V(u) with closed-form first and second derivatives.
///
/// The built-in potentials are bound to a surface and use its pinned Θ:
/// V₁ = a Θ and V₂ = k Θ⁻². Changing the Θ constant shifts V₁ by a constant
/// but reshapes V₂, so V₂ is canonical only on constant-h surfaces.
class CentralPotential {
public:
    double value(double u) const;
    double d1(double u) const;
    double d2(double u) const;

    PotentialKind kind() const { return kind_; }
    /// a for gravitational, k for harmonic, 1 for custom.
    double strength() const { return strength_; }
    const std::string& expression() const { return text_; }
    const std::shared_ptr<const Surface>& surface() const { return surface_; }

    /// Same family with the strength multiplied by lambda > 0.
    CentralPotential scaled(double lambda) const;

    friend CentralPotential gravitational(double a, std::shared_ptr<const Surface> s);
    friend CentralPotential harmonic(double k, std::shared_ptr<const Surface> s);
    friend CentralPotential custom_potential(std::string_view text);

private:
    CentralPotential() = default;

    PotentialKind kind_ = PotentialKind::Custom;
    double strength_ = 1.0;
    std::shared_ptr<const Surface> surface_;
    std::string text_;
    expr::Expr v_[3];
};

/// V₁ = a Θ(u), a > 0.
CentralPotential gravitational(double a, std::shared_ptr<const Surface> s);

/// V₂ = k Θ(u)⁻², k > 0. Evaluation throws ThetaZero where Θ vanishes.
CentralPotential harmonic(double k, std::shared_ptr<const Surface> s);

/// V from an expression in u; derivatives from the expression tree.
CentralPotential custom_potential(std::string_view text);

/// (1/f²) d/du (f² V') = V'' + 2 f' V' / f.
double laplace_beltrami_residual(const CentralPotential& p, const Surface& s, double u);

} // namespace revorbit
