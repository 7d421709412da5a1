#include "rset/quadrature.hpp"

#include <array>
#include <cmath>

#include "rset/error.hpp"

namespace rset {
namespace {

struct GaussRule {
  std::array<double, 15> node;
  std::array<double, 15> weight;
};

// Legendre P_n(x) and its derivative by the usual three-term recurrence.
void legendre_15(double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= 15; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = 15.0 * (x * p1 - p0) / (x * x - 1.0);
}

GaussRule make_rule() {
  GaussRule r;
  for (int i = 0; i < 15; ++i) {
    // Chebyshev-based initial guess, then Newton to machine precision.
    double x = std::cos(M_PI * (i + 0.75) / 15.5);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre_15(x, p, dp);
      double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p, dp;
    legendre_15(x, p, dp);
    r.node[i] = x;
    r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& rule() {
  static const GaussRule r = make_rule();
  return r;
}

double panel(const std::function<double(double)>& fn, double a, double b) {
  const GaussRule& r = rule();
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 15; ++i) s += r.weight[i] * fn(mid + half * r.node[i]);
  return half * s;
}

double adapt(const std::function<double(double)>& fn, double a, double b, double whole,
             double rel_tol, int depth) {
  double mid = 0.5 * (a + b);
  double left = panel(fn, a, mid);
  double right = panel(fn, mid, b);
  double refined = left + right;
  double err = std::abs(refined - whole);
  if (depth >= 40 || err <= rel_tol * std::max(std::abs(refined), 1e-300) || err <= 1e-300) {
    return refined;
  }
  return adapt(fn, a, mid, left, rel_tol, depth + 1) +
         adapt(fn, mid, b, right, rel_tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double a, double b, double rel_tol) {
  if (!(a <= b)) fail(Errc::bad_input, "integration bounds out of order");
  if (a == b) return 0.0;
  return adapt(fn, a, b, panel(fn, a, b), rel_tol, 0);
}

double bisect_root(const std::function<double(double)>& fn, double a, double b, double x_tol) {
  double fa = fn(a), fb = fn(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) fail(Errc::bad_input, "root is not bracketed");
  while (b - a > x_tol) {
    double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    double fm = fn(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace rset
