#include "revorbit/geometry.hpp"

#include "revorbit/error.hpp"
#include "revorbit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace revorbit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPoleTol = 1e-12;
constexpr double kSlopeTol = 1e-12;
constexpr double kQuadTol = 1e-10;

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::string_view to_string(SurfaceClass c) {
    switch (c) {
    case SurfaceClass::Spherical: return "Spherical";
    case SurfaceClass::Hyperboloidal: return "Hyperboloidal";
    case SurfaceClass::Toroidal: return "Toroidal";
    case SurfaceClass::Paraboloidal: return "Paraboloidal";
    }
    return "?";
}

bool Interval::contains(double u) const {
    if (!std::isfinite(u)) return false;
    const bool lo_ok = lo_kind == EndKind::Infinite || (lo_kind == EndKind::Closed ? u >= lo : u > lo);
    const bool hi_ok = hi_kind == EndKind::Infinite || (hi_kind == EndKind::Closed ? u <= hi : u < hi);
    return lo_ok && hi_ok;
}

Profile::Profile(expr::Expr f) {
    d_[0] = std::move(f);
    for (int k = 1; k < 4; ++k) d_[k] = expr::derivative(d_[k - 1]);
}

Profile parse_profile(std::string_view text) {
    return Profile(expr::parse(text));
}

// ---------------------------------------------------------------------------
// Surface

Surface::Surface(Profile profile, Interval domain, SurfaceClass cls, std::optional<double> b_squared,
                 ThetaSpec theta, double g_ref, std::string label)
    : profile_(std::move(profile)), domain_(domain), class_(cls), b_squared_(b_squared), theta_(theta),
      g_ref_(g_ref), label_(std::move(label)) {
    if (!(domain_.lo < domain_.hi)) throw InvalidSurface("empty domain");
    auto is_pole = [&](double end, EndKind kind) {
        if (kind != EndKind::Closed) return false;
        try {
            return std::abs(profile_.f(end)) <= kPoleTol;
        } catch (const EvalError&) {
            return true;
        }
    };
    pole_lo_ = is_pole(domain_.lo, domain_.lo_kind);
    pole_hi_ = is_pole(domain_.hi, domain_.hi_kind);
}

Surface Surface::with_height(expr::Expr g) const {
    Surface copy = *this;
    copy.height_ = std::move(g);
    return copy;
}

bool Surface::theta_closed_form() const {
    return b_squared_.has_value() && std::abs(*b_squared_) > 1e-12;
}

Interval Surface::sampling_window(double reach) const {
    Interval w = domain_;
    if (w.lo_kind == EndKind::Infinite) w.lo = w.hi_kind == EndKind::Infinite ? -reach : w.hi - reach;
    if (w.hi_kind == EndKind::Infinite) w.hi = domain_.lo_kind == EndKind::Infinite ? reach : w.lo + reach;
    return w;
}

std::vector<double> Surface::interior_grid(int n) const {
    const Interval w = sampling_window();
    std::vector<double> out(static_cast<std::size_t>(n));
    const double width = w.hi - w.lo;
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = w.lo + (i + 0.5) * width / n;
    return out;
}

void Surface::require_regular(double u) const {
    if (!domain_.contains(u)) throw DomainError("u = " + format_number(u) + " is outside the surface domain");
    if ((pole_lo_ && u == domain_.lo) || (pole_hi_ && u == domain_.hi)) {
        throw SingularPoint("f vanishes at u = " + format_number(u));
    }
    if (!(profile_.f(u) > 0.0)) throw SingularPoint("f vanishes at u = " + format_number(u));
}

// ---------------------------------------------------------------------------
// Pointwise geometry

double gaussian_curvature(const Surface& s, double u) {
    s.require_regular(u);
    return -s.d2f(u) / s.f(u);
}

double h_function(const Surface& s, double u) {
    if (!s.domain().contains(u)) throw DomainError("u outside the surface domain");
    const double f = s.f(u);
    const double df = s.df(u);
    return -f * s.d2f(u) + df * df;
}

double h_derivative(const Surface& s, double u) {
    if (!s.domain().contains(u)) throw DomainError("u outside the surface domain");
    return s.df(u) * s.d2f(u) - s.f(u) * s.d3f(u);
}

double theta(const Surface& s, double u) {
    s.require_regular(u);
    if (s.theta_closed_form()) {
        return -s.df(u) / (*s.b_squared() * s.f(u));
    }
    const ThetaSpec& spec = s.theta_spec();
    const auto integrand = [&s](double x) {
        const double f = s.f(x);
        if (!(f > 0.0)) throw SingularPoint("f vanishes on the Θ integration path");
        return 1.0 / (f * f);
    };
    return spec.constant + numerics::integrate_or_throw(integrand, spec.u_ref, u, kQuadTol, 1e-13);
}

double theta_inverse(const Surface& s, double value) {
    const Interval& dom = s.domain();
    const Interval win = s.sampling_window();
    const double mid = 0.5 * (win.lo + win.hi);
    const auto safe_theta = [&s](double u, double& out) {
        try {
            out = theta(s, u);
            return std::isfinite(out);
        } catch (const Error&) {
            return false;
        }
    };

    double th_mid;
    if (!safe_theta(mid, th_mid)) throw RangeError("Θ is not defined at the domain centre");
    if (th_mid == value) return mid;
    const bool go_up = value > th_mid;

    // March toward the relevant end until Θ passes the target.
    double inner = mid;
    double outer = mid;
    double th_outer = th_mid;
    bool bracketed = false;
    const double end = go_up ? dom.hi : dom.lo;
    const bool infinite_end = (go_up ? dom.hi_kind : dom.lo_kind) == EndKind::Infinite;
    double step = 0.25 * (win.hi - win.lo);
    for (int k = 0; k < 2000; ++k) {
        double next;
        if (infinite_end) {
            next = go_up ? outer + step : outer - step;
            step *= 2.0;
        } else {
            next = outer + 0.5 * (end - outer);
            if (next == outer || next == end) break;
        }
        double th_next;
        if (!safe_theta(next, th_next)) break;
        inner = outer;
        outer = next;
        th_outer = th_next;
        if (go_up ? th_outer >= value : th_outer <= value) {
            bracketed = true;
            break;
        }
        if (infinite_end && std::abs(outer) > 1e8) break;
    }
    if (!bracketed) throw RangeError("value " + format_number(value) + " is not attained by Θ on the domain");
    (void)th_outer;
    return numerics::brent([&](double u) { return theta(s, u) - value; }, std::min(inner, outer),
                           std::max(inner, outer), 1e-15);
}

double profile_g(const Surface& s, double u, int sign) {
    if (!s.domain().contains(u)) throw DomainError("u outside the surface domain");
    const double dir = sign >= 0 ? 1.0 : -1.0;
    if (s.height()) {
        return dir * (expr::eval(*s.height(), u) - expr::eval(*s.height(), s.g_ref()));
    }
    const auto integrand = [&s](double x) {
        const double slope = s.df(x);
        const double rest = 1.0 - slope * slope;
        if (rest < -kSlopeTol) throw NonEmbeddable("f'^2 > 1 on the profile; g is not real there");
        return std::sqrt(std::max(rest, 0.0));
    };
    return dir * numerics::integrate_or_throw(integrand, s.g_ref(), u, kQuadTol, 1e-13);
}

EmbeddedPoint embed(const Surface& s, double u, double phi) {
    if (!s.domain().contains(u)) throw DomainError("u outside the surface domain");
    const double r = s.f(u);
    return {r * std::cos(phi), r * std::sin(phi), profile_g(s, u, +1)};
}

// ---------------------------------------------------------------------------
// Constructors

namespace {

double default_reference(const Interval& dom) {
    const bool lo_inf = dom.lo_kind == EndKind::Infinite;
    const bool hi_inf = dom.hi_kind == EndKind::Infinite;
    if (!lo_inf && !hi_inf) return 0.5 * (dom.lo + dom.hi);
    if (!lo_inf) return dom.lo + 1.0;
    if (!hi_inf) return dom.hi - 1.0;
    return 0.0;
}

double default_g_ref(const Interval& dom) {
    if (dom.contains(0.0)) return 0.0;
    if (dom.lo_kind != EndKind::Infinite) return dom.lo;
    return dom.hi;
}

SurfaceClass classify(bool pole_lo, bool pole_hi) {
    if (pole_lo && pole_hi) return SurfaceClass::Spherical;
    if (pole_lo || pole_hi) return SurfaceClass::Paraboloidal;
    return SurfaceClass::Hyperboloidal;
}

Surface finish(Profile profile, Interval dom, std::optional<double> b_squared, std::optional<double> theta_ref,
               double theta_constant, std::string label) {
    auto pole = [&](double end, EndKind kind) {
        if (kind != EndKind::Closed) return false;
        try {
            return std::abs(profile.f(end)) <= kPoleTol;
        } catch (const EvalError&) {
            return true;
        }
    };
    const SurfaceClass cls = classify(pole(dom.lo, dom.lo_kind), pole(dom.hi, dom.hi_kind));
    const ThetaSpec spec{theta_ref.value_or(default_reference(dom)), theta_constant};
    Surface s(std::move(profile), dom, cls, b_squared, spec, default_g_ref(dom), std::move(label));

    const double mid = default_reference(dom);
    const double f_mid = s.f(mid);
    const double df_mid = s.df(mid);
    if (!(f_mid > 0.0)) throw InvalidSurface("f is not positive inside the domain");
    if (df_mid * df_mid > 1.0 + kSlopeTol) throw InvalidSurface("f'^2 > 1 inside the domain");

    if (b_squared) {
        for (double u : s.interior_grid(100)) {
            const double h = h_function(s, u);
            if (std::abs(h - *b_squared) > 1e-9 * (1.0 + std::abs(*b_squared))) {
                throw InvalidSurface("h(u) deviates from the stored b^2 at u = " + format_number(u));
            }
        }
    }
    return s;
}

struct Root {
    bool found = false;
    double u = 0.0;
};

// Solves s (C1 x - C2 / x) = t for x = exp(s u) subject to f(x) > 0.
Root exp_slope_root(double s, double C1, double C2, double t) {
    std::vector<double> xs;
    if (C1 == 0.0) {
        xs.push_back(-C2 * s / t);
    } else {
        const double disc = t * t / (s * s) + 4.0 * C1 * C2;
        if (disc < 0.0) return {};
        const double sq = std::sqrt(disc);
        xs.push_back((t / s + sq) / (2.0 * C1));
        xs.push_back((t / s - sq) / (2.0 * C1));
    }
    Root best;
    double best_f = 0.0;
    for (double x : xs) {
        if (!(x > 0.0)) continue;
        const double f = C1 * x + C2 / x;
        if (f > best_f) {
            best_f = f;
            best = {true, std::log(x) / s};
        }
    }
    return best;
}

} // namespace

Surface make_constant_curvature(double K, double C1, double C2) {
    using namespace expr;
    const Expr u = variable();
    std::ostringstream label;
    label << "constant_curvature(K=" << format_number(K) << ", C1=" << format_number(C1)
          << ", C2=" << format_number(C2) << ")";

    if (K > 0.0) {
        const double s = std::sqrt(K);
        const double R = std::hypot(C1, C2);
        if (R == 0.0) throw InvalidSurface("f vanishes identically");
        const Expr su = constant(s) * u;
        Profile profile(constant(C1) * cos(su) + constant(C2) * sin(su));
        const double delta = std::atan2(C2, C1);
        const double b2 = K * (C1 * C1 + C2 * C2);
        Interval dom;
        if (R * s <= 1.0) {
            dom = {(delta - std::numbers::pi / 2) / s, (delta + std::numbers::pi / 2) / s, EndKind::Closed,
                   EndKind::Closed};
        } else {
            const double half = std::asin(1.0 / (R * s));
            dom = {(delta - half) / s, (delta + half) / s, EndKind::Open, EndKind::Open};
        }
        return finish(std::move(profile), dom, b2, std::nullopt, 0.0, label.str());
    }

    if (K < 0.0) {
        const double s = std::sqrt(-K);
        Profile profile(constant(C1) * exp(constant(s) * u) + constant(C2) * exp(constant(-s) * u));
        // Region where f > 0; f' is strictly increasing on it since f'' = s² f.
        Interval region{-kInf, kInf, EndKind::Infinite, EndKind::Infinite};
        if (C1 > 0.0 && C2 < 0.0) {
            region.lo = std::log(-C2 / C1) / (2.0 * s);
            region.lo_kind = EndKind::Closed;
        } else if (C1 < 0.0 && C2 > 0.0) {
            region.hi = std::log(-C2 / C1) / (2.0 * s);
            region.hi_kind = EndKind::Closed;
        } else if (!(C1 >= 0.0 && C2 >= 0.0) || (C1 == 0.0 && C2 == 0.0)) {
            throw InvalidSurface("f <= 0 everywhere");
        }
        Interval dom = region;
        const Root lower = exp_slope_root(s, C1, C2, -1.0);
        const Root upper = exp_slope_root(s, C1, C2, +1.0);
        if (lower.found && region.contains(lower.u) && (region.lo_kind == EndKind::Infinite || lower.u > region.lo)) {
            dom.lo = lower.u;
            dom.lo_kind = EndKind::Open;
        }
        if (upper.found && region.contains(upper.u) && (region.hi_kind == EndKind::Infinite || upper.u < region.hi)) {
            dom.hi = upper.u;
            dom.hi_kind = EndKind::Open;
        }
        if (!(dom.lo < dom.hi)) throw InvalidSurface("no interval with f > 0 and f'^2 <= 1");
        return finish(std::move(profile), dom, 4.0 * K * C1 * C2, std::nullopt, 0.0, label.str());
    }

    if (std::abs(C1) > 1.0) throw InvalidSurface("|f'| = |C1| > 1: profile is not unit-speed realizable");
    Profile profile(constant(C1) * u + constant(C2));
    Interval dom;
    if (C1 > 0.0) {
        dom = {-C2 / C1, kInf, EndKind::Closed, EndKind::Infinite};
    } else if (C1 < 0.0) {
        dom = {-kInf, -C2 / C1, EndKind::Infinite, EndKind::Closed};
    } else {
        if (!(C2 > 0.0)) throw InvalidSurface("f <= 0 everywhere");
        dom = {-kInf, kInf, EndKind::Infinite, EndKind::Infinite};
    }
    return finish(std::move(profile), dom, C1 * C1, std::nullopt, 0.0, label.str());
}

Surface make_torus(double R, double r) {
    if (!(r > 0.0) || !(R > r)) throw InvalidSurface("torus needs R > r > 0");
    using namespace expr;
    const Expr u = variable();
    const Expr arg = u / constant(r);
    Profile profile(constant(R) + constant(r) * cos(arg));
    const Interval dom{0.0, 2.0 * std::numbers::pi * r, EndKind::Closed, EndKind::Closed};
    std::ostringstream label;
    label << "torus(R=" << format_number(R) << ", r=" << format_number(r) << ")";
    const ThetaSpec spec{std::numbers::pi * r, 0.0};
    Surface s(std::move(profile), dom, SurfaceClass::Toroidal, std::nullopt, spec, 0.0, label.str());
    return s.with_height(constant(r) * sin(arg));
}

Surface make_custom(std::string_view f_expr, double c, double d, const CustomSurfaceOptions& opts) {
    if (!(c < d)) throw InvalidSurface("custom domain needs c < d");
    Profile profile = parse_profile(f_expr);
    Interval user{c, d, std::isinf(c) ? EndKind::Infinite : EndKind::Closed,
                  std::isinf(d) ? EndKind::Infinite : EndKind::Closed};
    const double ref = opts.theta_ref.value_or(default_reference(user));
    if (!user.interior(ref)) throw InvalidSurface("Θ reference point is not inside the domain");

    const auto admissible = [&profile](double u) {
        try {
            const double f = profile.f(u);
            const double df = profile.df(u);
            return std::isfinite(f) && f > 0.0 && df * df <= 1.0 + kSlopeTol;
        } catch (const EvalError&) {
            return false;
        }
    };
    if (!admissible(ref)) throw InvalidSurface("f <= 0 or f'^2 > 1 at the Θ reference point");

    Interval dom = user;
    const auto slope_ok = [&profile](double u) {
        try {
            const double df = profile.df(u);
            return df * df <= 1.0 + kSlopeTol;
        } catch (const EvalError&) {
            return false;
        }
    };
    const auto f_or_nan = [&profile](double u) {
        try {
            return profile.f(u);
        } catch (const EvalError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    // Scan from the reference outward. The first inadmissible sample marks
    // either a pole (f changes sign) or a slope clipping boundary.
    const auto clip = [&](double end, bool infinite, double& out, EndKind& kind) {
        constexpr int kSamples = 4096;
        constexpr double kReach = 500.0;
        double prev = ref;
        for (int k = 1; k <= kSamples; ++k) {
            const double frac = static_cast<double>(k) / kSamples;
            const double x = infinite ? ref + std::copysign(kReach * frac * frac, end) : ref + (end - ref) * frac;
            if (admissible(x)) {
                prev = x;
                continue;
            }
            const double fx = f_or_nan(x);
            if (!infinite && k == kSamples && std::abs(fx) <= kPoleTol && slope_ok(x)) {
                out = end;
                kind = EndKind::Closed;
                return;
            }
            if (fx <= 0.0) {
                const double root = numerics::brent([&](double u) { return profile.f(u); }, std::min(prev, x),
                                                    std::max(prev, x), 1e-15);
                if (slope_ok(root) && slope_ok(0.5 * (prev + root))) {
                    out = root;
                    kind = EndKind::Closed;
                    return;
                }
            }
            double good = prev;
            double bad = x;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (good + bad);
                if (m == good || m == bad) break;
                (admissible(m) ? good : bad) = m;
            }
            out = good;
            kind = EndKind::Open;
            return;
        }
        out = end;
        kind = infinite ? EndKind::Infinite : EndKind::Closed;
    };
    clip(d, std::isinf(d), dom.hi, dom.hi_kind);
    clip(c, std::isinf(c), dom.lo, dom.lo_kind);
    if (dom.lo_kind == EndKind::Infinite) dom.lo = -kInf;
    if (dom.hi_kind == EndKind::Infinite) dom.hi = kInf;

    std::string label = "custom(f=" + std::string(f_expr) + ")";
    Surface s = finish(std::move(profile), dom, std::nullopt, ref, opts.theta_constant, std::move(label));
    const HConstancy hc = h_constancy(s);
    if (hc.constant) {
        Surface pinned(s.profile(), s.domain(), s.surface_class(), hc.mean, s.theta_spec(), s.g_ref(), s.label());
        return pinned;
    }
    return s;
}

HConstancy h_constancy(const Surface& s, int n_grid, int n_random, double tol, std::uint64_t seed) {
    std::vector<double> points = s.interior_grid(n_grid);
    const Interval w = s.sampling_window();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(w.lo, w.hi);
    for (int i = 0; i < n_random; ++i) {
        double x = dist(rng);
        if (!w.interior(x)) x = 0.5 * (w.lo + w.hi);
        points.push_back(x);
    }
    double lo = kInf, hi = -kInf, sum = 0.0;
    for (double u : points) {
        const double h = h_function(s, u);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
        sum += h;
    }
    HConstancy out;
    out.mean = sum / static_cast<double>(points.size());
    out.spread = hi - lo;
    out.constant = out.spread <= tol * (1.0 + std::abs(out.mean));
    return out;
}

} // namespace revorbit
