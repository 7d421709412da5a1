#include "rset/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rset {
namespace {

constexpr std::int64_t kFar = std::numeric_limits<std::int64_t>::max() / 4;

// 1-D squared-distance lower envelope (Felzenszwalb & Huttenlocher). Input f
// holds squared source weights per position (kFar where no source), output d
// the exact min over q of (p-q)^2 + f[q]. Breakpoints are computed in double;
// a misranked query would need two integer parabolas closer than one unit at
// an integer abscissa, which forces an exact tie, so values are still exact.
void envelope_1d(const std::int64_t* f, int n, std::int64_t* d, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    if (f[q] >= kFar) continue;
    if (f[v[0]] >= kFar) {
      v[0] = q;
      continue;
    }
    double s = 0.0;
    while (true) {
      int p = v[k];
      s = (double(f[q] - f[p]) + double(q) * q - double(p) * p) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  if (f[v[0]] >= kFar) {
    for (int q = 0; q < n; ++q) d[q] = kFar;
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    std::int64_t dq = std::int64_t(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<std::int64_t> distance_transform_squared(const BinaryMask& mask) {
  if (!mask.any()) fail(Errc::empty_set, "distance transform of an empty mask");
  const GridDomain& dom = mask.domain();
  const int nx = dom.nx, ny = dom.ny;
  std::vector<std::int64_t> dist(dom.cell_count());

  // Pass 1: exact squared distance along each row (0 at true cells).
  std::vector<std::int64_t> row(nx);
  for (int j = 0; j < ny; ++j) {
    std::int64_t d = kFar;
    for (int i = 0; i < nx; ++i) {
      if (mask[dom.index(i, j)]) d = 0; else if (d < kFar) ++d;
      row[i] = d;
    }
    d = kFar;
    for (int i = nx - 1; i >= 0; --i) {
      if (mask[dom.index(i, j)]) d = 0; else if (d < kFar) ++d;
      row[i] = std::min(row[i], d);
      std::int64_t r = row[i];
      dist[dom.index(i, j)] = r >= kFar ? kFar : r * r;
    }
  }

  // Pass 2: lower envelope over each column.
  std::vector<std::int64_t> f(ny), d1(ny);
  std::vector<int> v(ny);
  std::vector<double> z(ny + 1);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) f[j] = dist[dom.index(i, j)];
    envelope_1d(f.data(), ny, d1.data(), v.data(), z.data());
    for (int j = 0; j < ny; ++j) dist[dom.index(i, j)] = d1[j];
  }
  return dist;
}

ScalarField distance_transform(const BinaryMask& mask) {
  std::vector<std::int64_t> sq = distance_transform_squared(mask);
  const GridDomain& dom = mask.domain();
  ScalarField out(dom);
  for (std::size_t k = 0; k < sq.size(); ++k)
    out[k] = dom.h * std::sqrt(double(sq[k]));
  return out;
}

ScalarField oriented_distance(const BinaryMask& mask) {
  if (!mask.any() || mask.all())
    fail(Errc::degenerate_boundary, "oriented distance needs a nonempty set with nonempty complement");
  std::vector<std::int64_t> din = distance_transform_squared(mask);
  std::vector<std::int64_t> dout = distance_transform_squared(complement(mask));
  const GridDomain& dom = mask.domain();
  const double half = 0.5 * dom.h;
  ScalarField out(dom);
  for (std::size_t k = 0; k < din.size(); ++k) {
    if (mask[k])
      out[k] = -(dom.h * std::sqrt(double(dout[k])) - half);
    else
      out[k] = dom.h * std::sqrt(double(din[k])) - half;
  }
  return out;
}

double hausdorff(const BinaryMask& a, const BinaryMask& b) {
  require_same_domain(a.domain(), b.domain(), "hausdorff");
  if (!a.any() || !b.any()) fail(Errc::empty_set, "hausdorff of an empty mask");
  std::vector<std::int64_t> da = distance_transform_squared(a);
  std::vector<std::int64_t> db = distance_transform_squared(b);
  const double h = a.domain().h;
  double worst = 0.0;
  for (std::size_t k = 0; k < da.size(); ++k) {
    double diff = std::abs(h * std::sqrt(double(da[k])) - h * std::sqrt(double(db[k])));
    worst = std::max(worst, diff);
  }
  return worst;
}

BinaryMask dilate(const BinaryMask& mask, double delta) {
  if (delta < 0.0 || !std::isfinite(delta)) fail(Errc::bad_input, "dilation radius must be finite and >= 0");
  if (!mask.any()) return BinaryMask(mask.domain());
  ScalarField d = distance_transform(mask);
  BinaryMask out(mask.domain());
  for (std::size_t k = 0; k < d.values().size(); ++k) out.set_index(k, d[k] <= delta);
  return out;
}

}  // namespace rset
