#pragma once

#include <functional>

namespace revorbit::numerics {

using Function = std::function<double(double)>;

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite interval.
/// Splits the interval with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol*|I|) or max_intervals is hit.
QuadratureResult integrate(const Function& f, double a, double b,
                           double abs_tol = 1e-10, double rel_tol = 1e-12,
                           int max_intervals = 2000);

/// Same as integrate() but throws QuadratureFailure when not converged.
double integrate_or_throw(const Function& f, double a, double b,
                          double abs_tol = 1e-10, double rel_tol = 1e-12,
                          int max_intervals = 2000);

/// Brent's method (zeroin). Requires f(a) and f(b) of opposite sign or one of
/// them zero; throws RangeError otherwise.
double brent(const Function& f, double a, double b, double xtol = 1e-14, int max_iter = 200);

/// Plain bisection to an absolute tolerance; same bracketing contract as brent.
double bisect(const Function& f, double a, double b, double xtol = 1e-14, int max_iter = 200);

/// Richardson-extrapolated central difference of order 1..4 with base step h.
/// Fourth-order accurate in h.
double derivative(const Function& f, double x, int order, double h);

} // namespace revorbit::numerics
