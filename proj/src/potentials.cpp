#include "revorbit/potentials.hpp"

#include "revorbit/error.hpp"

#include <cmath>

namespace revorbit {

namespace {

constexpr double kThetaZero = 1e-12;

double checked_theta(const Surface& s, double u) {
    const double th = theta(s, u);
    if (std::abs(th) <= kThetaZero) throw ThetaZero("Θ vanishes at u; V₂ is singular there");
    return th;
}

} // namespace

CentralPotential gravitational(double a, std::shared_ptr<const Surface> s) {
    if (!(a > 0.0)) throw InvalidArgument("gravitational potential needs a > 0");
    if (!s) throw InvalidArgument("gravitational potential needs a surface");
    CentralPotential p;
    p.kind_ = PotentialKind::Gravitational;
    p.strength_ = a;
    p.surface_ = std::move(s);
    return p;
}

CentralPotential harmonic(double k, std::shared_ptr<const Surface> s) {
    if (!(k > 0.0)) throw InvalidArgument("harmonic potential needs k > 0");
    if (!s) throw InvalidArgument("harmonic potential needs a surface");
    CentralPotential p;
    p.kind_ = PotentialKind::Harmonic;
    p.strength_ = k;
    p.surface_ = std::move(s);
    return p;
}

CentralPotential custom_potential(std::string_view text) {
    CentralPotential p;
    p.kind_ = PotentialKind::Custom;
    p.text_ = std::string(text);
    p.v_[0] = expr::parse(text);
    p.v_[1] = expr::derivative(p.v_[0]);
    p.v_[2] = expr::derivative(p.v_[1]);
    return p;
}

CentralPotential CentralPotential::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidArgument("scale factor must be positive");
    CentralPotential p = *this;
    p.strength_ *= lambda;
    if (kind_ == PotentialKind::Custom) {
        for (auto& tree : p.v_) tree = expr::constant(lambda) * tree;
        p.text_ = std::to_string(lambda) + "*(" + text_ + ")";
    }
    return p;
}

double CentralPotential::value(double u) const {
    switch (kind_) {
    case PotentialKind::Gravitational: return strength_ * theta(*surface_, u);
    case PotentialKind::Harmonic: {
        const double th = checked_theta(*surface_, u);
        return strength_ / (th * th);
    }
    case PotentialKind::Custom: break;
    }
    return expr::eval(v_[0], u);
}

double CentralPotential::d1(double u) const {
    switch (kind_) {
    case PotentialKind::Gravitational: {
        surface_->require_regular(u);
        const double f = surface_->f(u);
        return strength_ / (f * f);
    }
    case PotentialKind::Harmonic: {
        const double th = checked_theta(*surface_, u);
        const double f = surface_->f(u);
        return -2.0 * strength_ / (th * th * th * f * f);
    }
    case PotentialKind::Custom: break;
    }
    return expr::eval(v_[1], u);
}

double CentralPotential::d2(double u) const {
    switch (kind_) {
    case PotentialKind::Gravitational: {
        surface_->require_regular(u);
        const double f = surface_->f(u);
        return -2.0 * strength_ * surface_->df(u) / (f * f * f);
    }
    case PotentialKind::Harmonic: {
        // d/du [-2k Θ⁻³ f⁻²] with Θ' = 1/f².
        const double th = checked_theta(*surface_, u);
        const double f = surface_->f(u);
        const double f2 = f * f;
        const double th3 = th * th * th;
        return 6.0 * strength_ / (th3 * th * f2 * f2) + 4.0 * strength_ * surface_->df(u) / (th3 * f2 * f);
    }
    case PotentialKind::Custom: break;
    }
    return expr::eval(v_[2], u);
}

double laplace_beltrami_residual(const CentralPotential& p, const Surface& s, double u) {
    if (!s.domain().interior(u)) throw DomainError("u is not interior to the surface domain");
    return p.d2(u) + 2.0 * s.df(u) * p.d1(u) / s.f(u);
}

} // namespace revorbit
