#pragma once

#include "revorbit/geometry.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>

namespace revorbit::testing {

inline constexpr double kPi = std::numbers::pi;

using SurfacePtr = std::shared_ptr<const Surface>;

inline SurfacePtr share(Surface s) { return std::make_shared<const Surface>(std::move(s)); }

inline SurfacePtr unit_sphere() { return share(make_constant_curvature(1.0, 0.0, 1.0)); }
inline SurfacePtr plane() { return share(make_constant_curvature(0.0, 1.0, 0.0)); }
// K = 1 with b = 1/2: orbits wind twice before closing.
inline SurfacePtr half_sphere() { return share(make_constant_curvature(1.0, 0.0, 0.5)); }
// K = 4, f = sin(2u)/2: b² = 1 on a sphere of radius 1/2.
inline SurfacePtr small_sphere() { return share(make_constant_curvature(4.0, 0.0, 0.5)); }
inline SurfacePtr torus() { return share(make_torus(2.0, 1.0)); }
inline SurfacePtr pseudosphere() { return share(make_custom("exp(u)", -INFINITY, 0.0)); }

// Composite Simpson on [a, b] with n (even) panels. Independent of the
// adaptive Gauss-Kronrod code it is used to check.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

// Plain central difference, used only where a loose tolerance is enough.
inline double central(const std::function<double(double)>& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace revorbit::testing
