#include "rset/levelset.hpp"

#include <cmath>

namespace rset {

void LevelSpec::validate() const {
  if (std::isnan(p1) || std::isnan(p2)) fail(Errc::bad_input, "level bounds must not be NaN");
  if (!(p1 <= p2)) fail(Errc::bad_input, "level band needs p1 <= p2");
  if (!(boundary_tol >= 0.0)) fail(Errc::bad_input, "boundary tolerance must be >= 0");
}

BinaryMask sublevel_set(const ScalarField& f, double p) {
  BinaryMask out(f.domain());
  const auto& v = f.values();
  for (std::size_t k = 0; k < v.size(); ++k) out.set_index(k, v[k] <= p);
  return out;
}

BinaryMask level_band(const ScalarField& f, const LevelSpec& spec) {
  spec.validate();
  BinaryMask out(f.domain());
  const auto& v = f.values();
  for (std::size_t k = 0; k < v.size(); ++k) out.set_index(k, spec.p1 <= v[k] && v[k] <= spec.p2);
  return out;
}

BinaryMask level_boundary(const ScalarField& f, double p, double tol, bool capture_sign_changes) {
  if (!(tol >= 0.0)) fail(Errc::bad_input, "boundary tolerance must be >= 0");
  const GridDomain& dom = f.domain();
  BinaryMask out(dom);
  for (int j = 0; j < dom.ny; ++j) {
    for (int i = 0; i < dom.nx; ++i) {
      double d = f[dom.index(i, j)] - p;
      bool on = std::abs(d) <= tol;
      if (!on && capture_sign_changes && d != 0.0) {
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int t = 0; t < 4 && !on; ++t) {
          int ii = i + di[t], jj = j + dj[t];
          if (ii < 0 || ii >= dom.nx || jj < 0 || jj >= dom.ny) continue;
          double dn = f[dom.index(ii, jj)] - p;
          on = (d > 0.0 && dn < 0.0) || (d < 0.0 && dn > 0.0);
        }
      }
      out.set_index(dom.index(i, j), on);
    }
  }
  return out;
}

ConsistencyReport check_consistency(const ScalarField& f, double p, double tol) {
  if (!(tol >= 0.0)) fail(Errc::bad_input, "tolerance must be >= 0");
  const GridDomain& dom = f.domain();
  ConsistencyReport report;
  for (int j = 0; j < dom.ny; ++j) {
    for (int i = 0; i < dom.nx; ++i) {
      if (std::abs(f[dom.index(i, j)] - p) > tol) continue;
      bool below = false, above = false;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= dom.nx || jj < 0 || jj >= dom.ny) continue;
          double v = f[dom.index(ii, jj)];
          below = below || v < p - tol;
          above = above || v > p + tol;
        }
      }
      if (!below) report.condA_violations.emplace_back(i, j);
      if (!above) report.condB_violations.emplace_back(i, j);
    }
  }
  report.satisfied_A = report.condA_violations.empty();
  report.satisfied_B = report.condB_violations.empty();
  return report;
}

bool directional_monotonicity(const ScalarField& f, double e0x, double e0y) {
  double norm = std::hypot(e0x, e0y);
  if (std::abs(norm - 1.0) > 1e-9) fail(Errc::bad_input, "direction must be a unit vector");
  // Nearest lattice direction among the 8 neighbours.
  int best_di = 1, best_dj = 0;
  double best = -2.0;
  const int di8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  const int dj8[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  for (int t = 0; t < 8; ++t) {
    double len = std::hypot(double(di8[t]), double(dj8[t]));
    double dot = (e0x * di8[t] + e0y * dj8[t]) / len;
    if (dot > best) {
      best = dot;
      best_di = di8[t];
      best_dj = dj8[t];
    }
  }
  const GridDomain& dom = f.domain();
  for (int j = 0; j < dom.ny; ++j) {
    for (int i = 0; i < dom.nx; ++i) {
      int ii = i + best_di, jj = j + best_dj;
      if (ii < 0 || ii >= dom.nx || jj < 0 || jj >= dom.ny) continue;
      if (!(f[dom.index(ii, jj)] - f[dom.index(i, j)] > 0.0)) return false;
    }
  }
  return true;
}

}  // namespace rset
