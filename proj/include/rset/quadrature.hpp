#pragma once

#include <functional>

namespace rset {

// Integral of fn over [a, b] by adaptive 15-point Gauss-Legendre bisection.
// Recursion stops when a panel's refined estimate agrees with its coarse one
// to rel_tol (or abs floor for near-zero panels).
double integrate(const std::function<double(double)>& fn, double a, double b,
                 double rel_tol = 1e-8);

// Root of a continuous monotone fn on [a, b] by bisection; fn(a) and fn(b)
// must bracket zero.
double bisect_root(const std::function<double(double)>& fn, double a, double b,
                   double x_tol = 1e-12);

}  // namespace rset
