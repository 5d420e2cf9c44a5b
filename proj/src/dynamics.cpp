#include "revorbit/dynamics.hpp"

#include "revorbit/error.hpp"
#include "revorbit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace revorbit {

double Trajectory::drift_max() const {
    double out = 0.0;
    for (double d : drift_log) out = std::max(out, d);
    return out;
}

double hamiltonian(const PhaseState& st, const Surface& s, const CentralPotential& p) {
    s.require_regular(st.u);
    const double f = s.f(st.u);
    return st.p_u * st.p_u / (2.0 * st.m) + st.p_phi * st.p_phi / (2.0 * st.m * f * f) + p.value(st.u);
}

StateDerivative eom(const PhaseState& st, const Surface& s, const CentralPotential& p) {
    s.require_regular(st.u);
    const double f = s.f(st.u);
    const double f3 = f * f * f;
    return {
        st.p_u / st.m,
        st.p_phi / (st.m * f * f),
        st.p_phi * st.p_phi * s.df(st.u) / (st.m * f3) - p.d1(st.u),
        0.0,
    };
}

namespace {

class ReducedSystem {
public:
    ReducedSystem(const Surface& s, const CentralPotential& p, double l, double m)
        : s_(s), p_(p), l_(l), m_(m), dom_(s.domain()),
          periodic_(s.surface_class() == SurfaceClass::Toroidal) {}

    double wrap(double u) const {
        if (!periodic_) return u;
        const double period = dom_.hi - dom_.lo;
        if (u < dom_.lo || u > dom_.hi) u = dom_.lo + std::fmod(std::fmod(u - dom_.lo, period) + period, period);
        return u;
    }

    bool valid(double u) const {
        if (!dom_.contains(u)) return false;
        if ((s_.pole_at_lo() && u == dom_.lo) || (s_.pole_at_hi() && u == dom_.hi)) return false;
        try {
            return s_.f(u) > 0.0;
        } catch (const Error&) {
            return false;
        }
    }

    /// -W'(u); nullopt where W is not defined.
    std::optional<double> force(double u) const {
        try {
            const double f = s_.f(u);
            const double F = l_ * l_ * s_.df(u) / (m_ * f * f * f) - p_.d1(u);
            if (!std::isfinite(F)) return std::nullopt;
            return F;
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    double angular_rate(double u) const {
        const double f = s_.f(u);
        return l_ / (m_ * f * f);
    }

    struct Step {
        double u, p_u, phi, force;
    };

    std::optional<Step> step(double u, double p_u, double phi, double f_old, double h) const {
        const double p_half = p_u + 0.5 * h * f_old;
        const double drift = h * p_half / m_;
        const double u_new = wrap(u + drift);
        if (!valid(u_new)) return std::nullopt;
        const double u_mid = wrap(u + 0.5 * drift);
        if (!valid(u_mid)) return std::nullopt;
        const auto f_new = force(u_new);
        if (!f_new) return std::nullopt;
        double rate;
        try {
            rate = angular_rate(u_mid);
        } catch (const Error&) {
            return std::nullopt;
        }
        return Step{u_new, p_half + 0.5 * h * *f_new, phi + h * rate, *f_new};
    }

    double distance_to_singular_end(double u) const {
        double d = std::numeric_limits<double>::infinity();
        if (dom_.lo_kind != EndKind::Infinite && !periodic_) d = std::min(d, u - dom_.lo);
        if (dom_.hi_kind != EndKind::Infinite && !periodic_) d = std::min(d, dom_.hi - u);
        return d;
    }

private:
    const Surface& s_;
    const CentralPotential& p_;
    double l_, m_;
    Interval dom_;
    bool periodic_;
};

} // namespace

Trajectory integrate(const Surface& s, const CentralPotential& p, const PhaseState& init, double dt, long n_steps) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (n_steps <= 0) throw InvalidArgument("n_steps must be positive");
    if (!(init.m > 0.0)) throw InvalidArgument("mass must be positive");

    Trajectory traj;
    traj.l = init.p_phi;
    traj.E0 = hamiltonian(init, s, p);
    const double f0 = s.f(init.u);
    const double kinetic0 = init.p_u * init.p_u / (2.0 * init.m) + init.p_phi * init.p_phi / (2.0 * init.m * f0 * f0);
    const double energy_scale = std::max({std::abs(traj.E0), kinetic0 + std::abs(p.value(init.u)), 1e-300});
    const double jump_limit = 1e-3 * energy_scale;

    const ReducedSystem sys(s, p, init.p_phi, init.m);
    const auto force0 = sys.force(init.u);
    if (!force0) throw DomainError("the effective force is undefined at the initial point");

    traj.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.drift_log.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.samples.push_back(init);
    traj.drift_log.push_back(0.0);

    PhaseState cur = init;
    double force = *force0;
    double energy = traj.E0;
    for (long n = 0; n < n_steps; ++n) {
        auto next = sys.step(cur.u, cur.p_u, cur.phi, force, dt);
        if (!next) {
            // Bisect the step fraction that still lands inside the domain.
            double good = 0.0, bad = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (good + bad);
                (sys.step(cur.u, cur.p_u, cur.phi, force, mid * dt) ? good : bad) = mid;
            }
            const auto last = sys.step(cur.u, cur.p_u, cur.phi, force, good * dt);
            traj.singular_end = SingularEnd{cur.t + good * dt, last ? last->u : cur.u};
            break;
        }
        PhaseState st = cur;
        st.t = init.t + static_cast<double>(n + 1) * dt;
        st.u = next->u;
        st.p_u = next->p_u;
        st.phi = next->phi;
        const double h_new = hamiltonian(st, s, p);
        if (!(std::abs(h_new - energy) <= jump_limit)) {
            const double travel = std::abs(st.u - cur.u);
            if (sys.distance_to_singular_end(st.u) < 10.0 * travel + 1e-12 ||
                sys.distance_to_singular_end(cur.u) < 10.0 * travel + 1e-12) {
                traj.singular_end = SingularEnd{cur.t, cur.u};
                break;
            }
            throw StepTooLarge("energy changed by " + std::to_string(std::abs(h_new - energy)) +
                               " in one step; reduce dt");
        }
        energy = h_new;
        force = next->force;
        cur = st;
        traj.samples.push_back(st);
        traj.drift_log.push_back(std::abs(h_new - traj.E0));
    }
    return traj;
}

std::vector<PlanarState> planar_from_plane_run(const Trajectory& run) {
    std::vector<PlanarState> out;
    out.reserve(run.samples.size());
    for (const PhaseState& st : run.samples) {
        out.push_back({st.t, st.u, st.phi, st.p_u / st.m, st.p_phi / (st.m * st.u * st.u)});
    }
    return out;
}

Trajectory appell_map(const Surface& s, std::span<const PlanarState> planar, double m) {
    if (!s.b_squared() || !s.theta_closed_form()) {
        throw NonConstantH("central projection needs a surface with constant h (pinned Θ)");
    }
    if (std::abs(*s.b_squared() - 1.0) > 1e-9) {
        throw InvalidSurface("central projection maps planar orbits only onto surfaces with h ≡ 1");
    }
    Trajectory out;
    out.samples.reserve(planar.size());
    double t = 0.0;
    double prev_u = 0.0;
    double prev_rate = 0.0;
    for (std::size_t i = 0; i < planar.size(); ++i) {
        const PlanarState& ps = planar[i];
        if (!(ps.r > 0.0)) throw RangeError("planar radius must be positive");
        const double target = -1.0 / ps.r;
        double u;
        bool local = false;
        if (i > 0) {
            // Θ is increasing; try a small bracket around the previous point first.
            const double width = 1e-2 * (1.0 + std::abs(prev_u));
            const double a = std::max(prev_u - width, s.domain().lo);
            const double b = std::min(prev_u + width, s.domain().hi);
            try {
                const double ta = theta(s, a) - target;
                const double tb = theta(s, b) - target;
                if (ta <= 0.0 && tb >= 0.0) {
                    u = numerics::brent([&](double x) { return theta(s, x) - target; }, a, b, 1e-15);
                    local = true;
                }
            } catch (const Error&) {
            }
        }
        if (!local) u = theta_inverse(s, target);

        const double f = s.f(u);
        // dt/dτ = (f Θ)² = f² / r²
        const double rate = f * f / (ps.r * ps.r);
        if (i > 0) t += 0.5 * (rate + prev_rate) * (ps.tau - planar[i - 1].tau);
        prev_rate = rate;
        prev_u = u;

        PhaseState st;
        st.t = t;
        st.u = u;
        st.phi = ps.psi;
        st.p_u = m * ps.dr;
        st.p_phi = m * ps.r * ps.r * ps.dpsi;
        st.m = m;
        out.samples.push_back(st);
    }
    if (!out.samples.empty()) out.l = out.samples.front().p_phi;
    return out;
}

} // namespace revorbit
