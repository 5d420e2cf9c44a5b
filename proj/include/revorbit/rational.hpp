#pragma once

#include <optional>
#include <vector>

namespace revorbit {

struct Rational {
    long p = 0;
    long q = 1;
    double residual = 0.0; // |x - p/q| of the value it approximates

    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

/// Continued-fraction convergents of x >= 0 whose denominators do not exceed q_max.
std::vector<Rational> convergents(double x, long q_max);

/// Closest convergent of x with denominator <= q_max.
Rational best_rational(double x, long q_max);

/// Rotation number Δφ/2π as a rational p/q: the first convergent within tol,
/// or nothing when no convergent with q <= q_max is that close.
std::optional<Rational> closure_check(double delta_phi, double tol, long q_max);

} // namespace revorbit
