#include "revorbit/analysis.hpp"

#include "revorbit/error.hpp"
#include "revorbit/kernels.hpp"
#include "revorbit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace revorbit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_error(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

bool is_finite_end(const Interval& d, int dir) {
    return dir < 0 ? d.lo_kind != EndKind::Infinite : d.hi_kind != EndKind::Infinite;
}

std::optional<double> try_eval(const std::function<double(double)>& fn, double u) {
    try {
        const double v = fn(u);
        if (std::isfinite(v)) return v;
    } catch (const Error&) {
    }
    return std::nullopt;
}

} // namespace

EffectiveProfile::EffectiveProfile(std::shared_ptr<const Surface> s, CentralPotential p, double l, double m)
    : surface_(std::move(s)), potential_(std::move(p)), l_(l), m_(m) {
    if (!surface_) throw InvalidArgument("effective potential needs a surface");
    if (!(m_ > 0.0)) throw InvalidArgument("mass must be positive");
}

double EffectiveProfile::W(double u) const {
    surface_->require_regular(u);
    const double f = surface_->f(u);
    return l_ * l_ / (2.0 * m_ * f * f) + potential_.value(u);
}

double EffectiveProfile::dW(double u) const {
    surface_->require_regular(u);
    const double f = surface_->f(u);
    return -l_ * l_ * surface_->df(u) / (m_ * f * f * f) + potential_.d1(u);
}

double EffectiveProfile::d2W(double u) const {
    surface_->require_regular(u);
    const double f = surface_->f(u);
    const double df = surface_->df(u);
    const double f2 = f * f;
    return l_ * l_ * (3.0 * df * df - f * surface_->d2f(u)) / (m_ * f2 * f2) + potential_.d2(u);
}

EffectiveProfile effective_potential(std::shared_ptr<const Surface> s, const CentralPotential& p, double l, double m) {
    return EffectiveProfile(std::move(s), p, l, m);
}

std::string_view to_string(CriticalType t) {
    switch (t) {
    case CriticalType::Minimum: return "Minimum";
    case CriticalType::Maximum: return "Maximum";
    case CriticalType::Degenerate: return "Degenerate";
    }
    return "?";
}

std::vector<CircularOrbit> circular_orbits(const EffectiveProfile& w, int n_cells) {
    const Interval win = w.surface().sampling_window();
    const double width = win.hi - win.lo;
    const auto dW = [&w](double u) { return w.dW(u); };

    std::vector<double> xs(static_cast<std::size_t>(n_cells) + 1);
    std::vector<std::optional<double>> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = win.lo + width * static_cast<double>(i) / n_cells;
        ys[i] = try_eval(dW, xs[i]);
    }

    std::vector<CircularOrbit> out;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!ys[i] || !ys[i + 1]) continue;
        const double ya = *ys[i], yb = *ys[i + 1];
        double root;
        if (ya == 0.0) {
            root = xs[i];
        } else if (yb == 0.0 || (ya > 0.0) == (yb > 0.0)) {
            continue;
        } else {
            root = numerics::bisect(dW, xs[i], xs[i + 1], 1e-12 * std::max(1.0, std::abs(xs[i])), 200);
        }
        const auto at_root = try_eval(dW, root);
        if (!at_root) continue;
        // A sign change across a pole of W' leaves a large value at the limit point.
        if (std::abs(*at_root) > 1e-6 * std::max({1.0, std::abs(ya), std::abs(yb)})) continue;
        if (!out.empty() && std::abs(out.back().u0 - root) <= 1e-10 * (1.0 + std::abs(root))) continue;

        CircularOrbit c;
        c.u0 = root;
        c.l = w.l();
        c.E = w.W(root);
        const double curv = w.d2W(root);
        if (std::abs(curv) <= 1e-10) c.type = CriticalType::Degenerate;
        else c.type = curv > 0.0 ? CriticalType::Minimum : CriticalType::Maximum;
        out.push_back(c);
    }
    return out;
}

CircularOrbit stable_circular_orbit(const EffectiveProfile& w, int n_cells) {
    for (const CircularOrbit& c : circular_orbits(w, n_cells)) {
        if (c.type == CriticalType::Minimum) return c;
    }
    throw NoCriticalPoint("the effective potential has no minimum");
}

double circular_l_squared(const Surface& s, const CentralPotential& p, double u0, double m) {
    s.require_regular(u0);
    const double df = s.df(u0);
    if (std::abs(df) <= 1e-12) throw DegenerateCircular("f' vanishes at u0");
    const double f = s.f(u0);
    const double l2 = m * f * f * f * p.d1(u0) / df;
    if (l2 < 0.0) throw RangeError("no real angular momentum makes u0 circular");
    return l2;
}

namespace {

/// Golden-section search for the maximum of W on [a, b]; points where W is
/// undefined count as +infinity so the search runs into singular walls.
double golden_argmax(const EffectiveProfile& w, double a, double b) {
    const auto value = [&w](double u) {
        try {
            const double v = w.W(u);
            return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = value(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = value(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

double find_barrier(const EffectiveProfile& w, double u0, double E, int dir) {
    const Interval& dom = w.surface().domain();
    const bool finite = is_finite_end(dom, dir);
    const double end = dir < 0 ? dom.lo : dom.hi;
    const bool end_closed = dir < 0 ? dom.lo_kind == EndKind::Closed : dom.hi_kind == EndKind::Closed;
    const auto above = [&](double x) {
        try {
            return !(w.W(x) < E);
        } catch (const Error&) {
            return true;
        }
    };

    // Steps are capped inside the sampling window so a march can not jump
    // over a singular wall into a region where W < E again.
    const Interval win = w.surface().sampling_window();
    const double max_step = (win.hi - win.lo) / 256.0;
    double x = u0;
    double step = std::min(1e-3 * (1.0 + std::abs(u0)), max_step);
    for (int it = 0; it < 100000; ++it) {
        double cand;
        if (finite) {
            const double room = dir * (end - x);
            if (room <= 1e-15 * (1.0 + std::abs(end))) throw Unbound("orbit reaches the domain boundary");
            if (step >= room) cand = end_closed ? end : x + 0.5 * dir * room;
            else cand = x + dir * step;
        } else {
            cand = x + dir * step;
            if (std::abs(cand) > 1e12) throw Unbound("no confining barrier: the orbit escapes");
        }
        if (!above(cand) && w.W(cand) < w.W(x)) {
            // W turned down below E: either a hump lower than E (the orbit
            // escapes over it) or a barrier skipped inside this step.
            const double top = golden_argmax(w, std::min(x, cand), std::max(x, cand));
            if (!above(top)) throw Unbound("the barrier on this side is lower than E");
            cand = top;
        }
        if (above(cand)) {
            double inside = x, outside = cand;
            for (int k = 0; k < 200 && inside != outside; ++k) {
                const double mid = 0.5 * (inside + outside);
                if (mid == inside || mid == outside) break;
                (above(mid) ? outside : inside) = mid;
            }
            // Polish with Brent when both ends evaluate.
            try {
                const double ga = w.W(inside) - E;
                const double gb = w.W(outside) - E;
                if (ga <= 0.0 && gb >= 0.0 && std::isfinite(gb)) {
                    return numerics::brent([&](double u) { return w.W(u) - E; }, std::min(inside, outside),
                                           std::max(inside, outside), 1e-16);
                }
            } catch (const Error&) {
            }
            return 0.5 * (inside + outside);
        }
        if (finite && cand == end) throw Unbound("orbit reaches the domain boundary");
        x = cand;
        step *= 2.0;
        if (win.contains(x)) step = std::min(step, max_step);
    }
    throw Unbound("no confining barrier found");
}

} // namespace

TurningPoints turning_points(const EffectiveProfile& w, double E, std::optional<double> u0) {
    const double centre = u0 ? *u0 : stable_circular_orbit(w).u0;
    const double W0 = w.W(centre);
    if (std::abs(E - W0) <= 1e-14 * (1.0 + std::abs(W0))) return {centre, centre};
    if (E < W0) throw InvalidArgument("energy lies below the minimum of the effective potential");
    return {find_barrier(w, centre, E, -1), find_barrier(w, centre, E, +1)};
}

ApsidalResult apsidal_angle(const EffectiveProfile& w, double E, std::optional<double> u0, const ApsidalOptions& opts) {
    const double centre = u0 ? *u0 : stable_circular_orbit(w).u0;
    const TurningPoints tp = turning_points(w, E, centre);
    const Surface& s = w.surface();
    const double l = w.l(), m = w.m();

    ApsidalResult r;
    r.E = E;
    r.l = l;
    r.u1 = tp.u1;
    r.u2 = tp.u2;

    if (tp.u1 == tp.u2) {
        // Small-oscillation limit.
        const double f = s.f(centre);
        const double omega = std::sqrt(w.d2W(centre) / m);
        r.period = kTwoPi / omega;
        r.delta_phi = r.period * l / (m * f * f);
    } else {
        const double span = tp.u2 - tp.u1;
        const double dW1 = w.dW(tp.u1), d2W1 = w.d2W(tp.u1);
        const double dW2 = w.dW(tp.u2), d2W2 = w.d2W(tp.u2);
        // The square-root endpoint behaviour makes Δφ sensitive to any
        // residual of W = E at the computed turning points, so the residuals
        // are removed by a linear correction and E - W vanishes exactly there.
        const double r1 = E - w.W(tp.u1), r2 = E - w.W(tp.u2);
        // a = u - u1 and b = u2 - u are formed from θ directly; forming them
        // by subtraction from u loses all precision next to the endpoints.
        const auto gap = [&](double u, double a, double b) {
            const double near_lo = -dW1 * a - 0.5 * d2W1 * a * a;
            const double near_hi = dW2 * b - 0.5 * d2W2 * b * b;
            if (a < 1e-6 * span) return near_lo;
            if (b < 1e-6 * span) return near_hi;
            const double g = E - w.W(u) - (r1 * b + r2 * a) / span;
            if (g > 0.0) return g;
            return a < b ? near_lo : near_hi;
        };
        const auto jacobian_over_speed = [&](double th, double& u) {
            const double sn = std::sin(th), cs = std::cos(th);
            const double a = span * sn * sn, b = span * cs * cs;
            u = a < b ? tp.u1 + a : tp.u2 - b;
            const double g = gap(u, a, b);
            if (!(g > 0.0)) return 0.0;
            return 2.0 * span * sn * cs / std::sqrt(2.0 * g / m);
        };
        const auto dphi = [&](double th) {
            double u;
            const double j = jacobian_over_speed(th, u);
            if (j == 0.0) return 0.0;
            const double f = s.f(u);
            return 2.0 * j * l / (m * f * f);
        };
        const auto dt = [&](double th) {
            double u;
            return 2.0 * jacobian_over_speed(th, u);
        };
        const double half_pi = 0.5 * std::numbers::pi;
        // Cancellation in E - W near the turning points leaves a noise floor
        // below accept_tol relative to the integral; only a larger error
        // estimate is a failure.
        const auto run = [&](const auto& fn) {
            const numerics::QuadratureResult q = numerics::integrate(fn, 0.0, half_pi, opts.abs_tol, 1e-13, 4000);
            if (!(q.error <= opts.accept_tol * std::max(1.0, std::abs(q.value))) || !std::isfinite(q.value)) {
                throw QuadratureFailure("apsidal quadrature error estimate " + format_error(q.error));
            }
            return q.value;
        };
        r.delta_phi = run(dphi);
        r.period = run(dt);
    }
    r.beta = kTwoPi / r.delta_phi;
    r.closure = closure_check(r.delta_phi, opts.closure_tol, opts.q_max);
    return r;
}

namespace {

/// Height of W above u0 reached walking outward until W first turns down.
/// Empty when W keeps rising up to a singular end.
std::optional<double> barrier_top(const EffectiveProfile& w, double u0, int dir) {
    const Interval win = w.surface().sampling_window();
    const double end = dir < 0 ? win.lo : win.hi;
    const int n = 8192;
    const double step = (end - u0) / n;
    const auto W = [&w](double u) { return w.W(u); };
    const auto dW = [&w](double u) { return w.dW(u); };
    double best = w.W(u0);
    for (int i = 1; i <= n; ++i) {
        const auto v = try_eval(W, u0 + step * i);
        if (!v) return std::nullopt;
        if (*v < best) {
            // Local maximum or a singular wall between samples i-2 and i.
            const double a = u0 + step * std::max(i - 2, 0), b = u0 + step * i;
            const double top = golden_argmax(w, std::min(a, b), std::max(a, b));
            const auto slope = try_eval(dW, top);
            const auto height = try_eval(W, top);
            const double ref = std::max({1.0, std::abs(try_eval(dW, a).value_or(0.0)),
                                         std::abs(try_eval(dW, b).value_or(0.0))});
            if (!slope || !height || std::abs(*slope) > 1e-6 * ref) return std::nullopt;
            return std::max(best, *height);
        }
        best = *v;
    }
    const bool infinite_end = !is_finite_end(w.surface().domain(), dir);
    if (infinite_end) return best;
    const bool pole = dir < 0 ? w.surface().pole_at_lo() : w.surface().pole_at_hi();
    if (pole) return std::nullopt;
    return best;
}

} // namespace

std::vector<double> energy_grid(const EffectiveProfile& w, const CircularOrbit& c, int n) {
    const double W0 = c.E;
    const auto left = barrier_top(w, c.u0, -1);
    const auto right = barrier_top(w, c.u0, +1);
    double H;
    if (left && right) H = std::min(*left, *right) - W0;
    else if (left) H = *left - W0;
    else if (right) H = *right - W0;
    else H = std::max(1.0, std::abs(W0));
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double expo = n == 1 ? 0.0 : -4.0 + 4.0 * i / (n - 1);
        out[static_cast<std::size_t>(i)] = W0 + 0.9 * H * std::pow(10.0, expo);
    }
    return out;
}

double abel_identity_check(const EffectiveProfile& w, const CircularOrbit& c, double beta,
                           const std::vector<double>& energies) {
    if (c.type != CriticalType::Minimum) throw DegenerateCircular("Abel identity needs a minimum of W");
    const Surface& s = w.surface();
    const auto inv_f2 = [&s](double u) {
        const double f = s.f(u);
        return 1.0 / (f * f);
    };
    double worst = 0.0;
    for (double E : energies) {
        const TurningPoints tp = turning_points(w, E, c.u0);
        const double lhs = numerics::integrate_or_throw(inv_f2, tp.u1, tp.u2, 1e-12, 1e-13);
        const double rhs = 2.0 * std::sqrt(2.0 * w.m()) * std::sqrt(std::max(E - c.E, 0.0)) / (w.l() * beta);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double first_order_condition_residual(const Surface& s, const CentralPotential& p, double u0, double beta) {
    s.require_regular(u0);
    const double v1 = p.d1(u0);
    const double df = s.df(u0);
    if (v1 == 0.0) throw DegenerateCircular("V' vanishes at u0");
    if (df == 0.0) throw DegenerateCircular("f' vanishes at u0");
    const double f = s.f(u0);
    return p.d2(u0) / v1 - (beta * beta - 3.0 * df * df) / (df * f) - s.d2f(u0) / df;
}

double first_order_beta_squared(const Surface& s, const CentralPotential& p, double u0) {
    s.require_regular(u0);
    const double v1 = p.d1(u0);
    const double df = s.df(u0);
    if (v1 == 0.0) throw DegenerateCircular("V' vanishes at u0");
    if (df == 0.0) throw DegenerateCircular("f' vanishes at u0");
    const double f = s.f(u0);
    return df * f * (p.d2(u0) / v1 - s.d2f(u0) / df) + 3.0 * df * df;
}

QuarticRoots beta_quartic(const Surface& s, double u) {
    const double h = h_function(s, u);
    const double hp = h_derivative(s, u);
    const double c0 = 4.0 * h * h + 3.0 * s.f(u) * s.df(u) * hp;
    const double disc = 25.0 * h * h - 4.0 * c0;
    QuarticRoots r;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // Avoid cancellation in the smaller root.
        const double big = 0.5 * (5.0 * h + std::copysign(sq, h));
        const double small = big != 0.0 ? c0 / big : 0.0;
        r.z1 = std::min(big, small);
        r.z2 = std::max(big, small);
        r.real = true;
    } else {
        r.z1 = r.z2 = 2.5 * h;
        r.imag = 0.5 * std::sqrt(-disc);
        r.real = false;
    }
    return r;
}

std::string_view to_string(BertrandVerdict v) {
    switch (v) {
    case BertrandVerdict::TwoPotentials: return "two";
    case BertrandVerdict::OnePotential: return "one";
    case BertrandVerdict::None: return "none";
    case BertrandVerdict::Degenerate: return "degenerate";
    }
    return "?";
}

namespace {

struct Spread {
    double mean = 0.0;
    double spread = 0.0;
};

Spread spread_of(const std::vector<double>& v) {
    if (v.empty()) return {};
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    return {sum / static_cast<double>(v.size()), *hi - *lo};
}

} // namespace

BertrandReport bertrand_classify(const Surface& s, const BertrandOptions& opts) {
    BertrandReport rep;
    rep.label = s.label();
    const std::vector<double> grid = s.interior_grid(opts.n_grid);

    const std::vector<double> hs = kernels::h_grid_parallel(s, grid);
    const Spread hsp = spread_of(hs);
    rep.h_spread = hsp.spread;
    rep.h_constant = hsp.spread <= opts.tol * (1.0 + std::abs(hsp.mean));

    const std::vector<QuarticRoots> roots = kernels::quartic_grid_parallel(s, grid);
    std::vector<double> z1(roots.size()), z2(roots.size());
    bool all_real = true;
    rep.roots.reserve(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        rep.roots.push_back({grid[i], roots[i]});
        z1[i] = roots[i].z1;
        z2[i] = roots[i].z2;
        all_real = all_real && roots[i].real;
    }
    const Spread s1 = spread_of(z1), s2 = spread_of(z2);
    rep.root_spread = {s1.spread, s2.spread};
    if (all_real) {
        for (const Spread& sp : {s1, s2}) {
            if (sp.spread <= opts.tol * (1.0 + std::abs(sp.mean))) rep.constant_roots.push_back(sp.mean);
        }
    }

    const auto add_potential = [&](const char* name, double beta) {
        rep.admissible.emplace_back(name);
        rep.beta.push_back(beta);
        const Rational q = best_rational(beta, opts.q_max);
        rep.rational.push_back(q);
        rep.rational_flag.push_back(q.residual <= opts.closure_tol);
    };

    if (rep.h_constant) {
        const double b2 = s.b_squared() ? *s.b_squared() : hsp.mean;
        rep.b_squared = b2;
        if (std::abs(b2) <= opts.tol) {
            rep.verdict = BertrandVerdict::Degenerate;
        } else if (b2 < 0.0) {
            rep.verdict = BertrandVerdict::None;
        } else {
            add_potential("V1", std::sqrt(b2));
            add_potential("V2", 2.0 * std::sqrt(b2));
            rep.verdict = BertrandVerdict::TwoPotentials;
        }
        return rep;
    }

    for (double z : rep.constant_roots) {
        if (z > opts.tol) {
            add_potential("V2", std::sqrt(z));
            rep.verdict = BertrandVerdict::OnePotential;
            return rep;
        }
    }
    rep.verdict = BertrandVerdict::None;
    return rep;
}

namespace {

double require_b(const Surface& s) {
    if (!s.b_squared() || !s.theta_closed_form()) {
        throw NonConstantH("analytic orbits need a surface with constant h");
    }
    if (!(*s.b_squared() > 0.0)) throw InvalidSurface("analytic orbits need b² > 0");
    return std::sqrt(*s.b_squared());
}

} // namespace

GravitationalOrbit::GravitationalOrbit(std::shared_ptr<const Surface> s, double a, double l, double m, double e,
                                       double phi0)
    : surface_(std::move(s)), e_(e), phi0_(phi0) {
    if (!surface_) throw InvalidArgument("orbit needs a surface");
    if (!(a > 0.0) || !(m > 0.0) || l == 0.0) throw InvalidArgument("orbit needs a > 0, m > 0, l != 0");
    if (e < 0.0) throw InvalidArgument("eccentricity must be non-negative");
    b_ = require_b(*surface_);
    p_ = b_ * b_ * l * l / (a * m);
}

double GravitationalOrbit::rho(double phi) const { return (1.0 + e_ * std::cos(b_ * (phi - phi0_))) / p_; }

double GravitationalOrbit::u(double phi) const { return theta_inverse(*surface_, -rho(phi)); }

HarmonicOrbit::HarmonicOrbit(std::shared_ptr<const Surface> s, double k, double l, double m, double h_int,
                             double phi0)
    : surface_(std::move(s)), h_int_(h_int), phi0_(phi0) {
    if (!surface_) throw InvalidArgument("orbit needs a surface");
    if (!(k > 0.0) || !(m > 0.0) || l == 0.0) throw InvalidArgument("orbit needs k > 0, m > 0, l != 0");
    b_ = require_b(*surface_);
    const double b2 = b_ * b_;
    const double eta2 = h_int * h_int / (b2 * b2) - 2.0 * k * m / (l * l * b2);
    if (eta2 < 0.0) throw ComplexEta("η² < 0: no real orbit for this first integral");
    eta_ = std::sqrt(eta2);
}

double HarmonicOrbit::rho_squared(double phi) const {
    return h_int_ / (b_ * b_) + eta_ * std::cos(2.0 * b_ * (phi - phi0_));
}

double HarmonicOrbit::rho(double phi) const {
    const double r2 = rho_squared(phi);
    if (r2 < 0.0) throw RangeError("ρ² < 0 on this orbit");
    return std::sqrt(r2);
}

double HarmonicOrbit::u(double phi) const { return theta_inverse(*surface_, -rho(phi)); }

double trajectory_equation_residual(const Surface& s, const CentralPotential& p, double l, double m,
                                    const std::function<double(double)>& rho, double phi_lo, double phi_hi, int n,
                                    double h) {
    const double b2 = [&] {
        if (!s.b_squared() || !s.theta_closed_form()) throw NonConstantH("trajectory equation needs constant h");
        return *s.b_squared();
    }();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double phi = n == 1 ? phi_lo : phi_lo + (phi_hi - phi_lo) * i / (n - 1);
        const double r0 = rho(phi);
        const double rpp = numerics::derivative(rho, phi, 2, h);
        const double u = theta_inverse(s, -r0);
        const double f = s.f(u);
        const double res = rpp + b2 * r0 - (m / (l * l)) * f * f * p.d1(u);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

std::array<double, 3> w_derivative_identities_check(const EffectiveProfile& w, const CircularOrbit& c, double beta) {
    if (c.type != CriticalType::Minimum) throw DegenerateCircular("identities hold at a minimum of W");
    const Surface& s = w.surface();
    const CentralPotential& p = w.potential();
    const double u0 = c.u0;
    const double v1 = p.d1(u0);
    const double f = s.f(u0), f1 = s.df(u0), f2 = s.d2f(u0), f3 = s.d3f(u0);
    if (v1 == 0.0 || f1 == 0.0) throw DegenerateCircular("V' or f' vanishes at u0");
    const double b2 = beta * beta;
    const double f1sq = f1 * f1;

    const double w2 = v1 * b2 / (f1 * f);
    const double w3 = v1 * ((b2 / f1sq - 7.0) / (f * f) + f2 / (f1sq * f)) * b2;
    const double w4 = v1 / (f1 * f * f * f) *
                      (b2 * b2 / f1sq - 12.0 * b2 - f * f * f2 * f2 / f1sq - 20.0 * f2 * f +
                       2.0 * f3 * f * f / f1 + 47.0 * f1sq) *
                      b2;

    const auto W = [&w](double u) { return w.W(u); };
    const double scale = 1.0 + std::abs(u0);
    const double fd2 = numerics::derivative(W, u0, 2, 1e-3 * scale);
    const double fd3 = numerics::derivative(W, u0, 3, 5e-3 * scale);
    const double fd4 = numerics::derivative(W, u0, 4, 1e-2 * scale);
    const auto rel = [](double exact, double approx) {
        const double denom = std::abs(exact) > 1e-12 ? std::abs(exact) : 1.0;
        return std::abs(exact - approx) / denom;
    };
    return {rel(w2, fd2), rel(w3, fd3), rel(w4, fd4)};
}

std::optional<MeasuredApsides> measured_apsidal_angle(const Trajectory& traj) {
    std::vector<double> phis, ts;
    const auto& smp = traj.samples;
    for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
        const double a = smp[i].p_u, b = smp[i + 1].p_u;
        if (a <= 0.0 && b > 0.0) {
            const double frac = -a / (b - a);
            phis.push_back(smp[i].phi + frac * (smp[i + 1].phi - smp[i].phi));
            ts.push_back(smp[i].t + frac * (smp[i + 1].t - smp[i].t));
        }
    }
    if (phis.size() < 2) return std::nullopt;
    const int periods = static_cast<int>(phis.size()) - 1;
    return MeasuredApsides{(phis.back() - phis.front()) / periods, (ts.back() - ts.front()) / periods, periods};
}

double max_trace_deviation(const Trajectory& a, const Trajectory& b) {
    if (a.samples.size() < 2) throw InvalidArgument("reference trace needs at least two samples");
    const double sign = a.samples.back().phi >= a.samples.front().phi ? 1.0 : -1.0;
    std::vector<double> phi(a.samples.size()), u(a.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        phi[i] = sign * a.samples[i].phi;
        u[i] = a.samples[i].u;
    }
    double worst = 0.0;
    for (const PhaseState& st : b.samples) {
        const double x = sign * st.phi;
        if (x < phi.front() || x > phi.back()) continue;
        auto it = std::upper_bound(phi.begin(), phi.end(), x);
        std::size_t j = static_cast<std::size_t>(it - phi.begin());
        if (j == 0) j = 1;
        if (j >= phi.size()) j = phi.size() - 1;
        const double span = phi[j] - phi[j - 1];
        const double frac = span > 0.0 ? (x - phi[j - 1]) / span : 0.0;
        const double ua = u[j - 1] + frac * (u[j] - u[j - 1]);
        worst = std::max(worst, std::abs(ua - st.u));
    }
    return worst;
}

} // namespace revorbit
