#include "revorbit/rational.hpp"

#include "revorbit/error.hpp"

#include <cmath>
#include <numbers>

namespace revorbit {

std::vector<Rational> convergents(double x, long q_max) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("convergents need a finite x >= 0");
    std::vector<Rational> out;
    // h_{n} = a_n h_{n-1} + h_{n-2}, likewise k_n.
    long h_prev = 1, h_prev2 = 0;
    long k_prev = 0, k_prev2 = 1;
    double rest = x;
    for (int n = 0; n < 64; ++n) {
        const double a_real = std::floor(rest);
        if (a_real > 1e15) break;
        const long a = static_cast<long>(a_real);
        const long h = a * h_prev + h_prev2;
        const long k = a * k_prev + k_prev2;
        if (k > q_max) break;
        out.push_back({h, k, std::abs(x - static_cast<double>(h) / static_cast<double>(k))});
        h_prev2 = h_prev; h_prev = h;
        k_prev2 = k_prev; k_prev = k;
        const double frac = rest - a_real;
        if (frac < 1e-15) break;
        rest = 1.0 / frac;
    }
    return out;
}

Rational best_rational(double x, long q_max) {
    const auto list = convergents(x, q_max);
    Rational best = list.front();
    for (const Rational& r : list) {
        if (r.residual < best.residual) best = r;
    }
    return best;
}

std::optional<Rational> closure_check(double delta_phi, double tol, long q_max) {
    if (!(delta_phi > 0.0)) throw InvalidArgument("closure_check needs delta_phi > 0");
    for (const Rational& r : convergents(delta_phi / (2.0 * std::numbers::pi), q_max)) {
        if (r.residual <= tol) return r;
    }
    return std::nullopt;
}

} // namespace revorbit
