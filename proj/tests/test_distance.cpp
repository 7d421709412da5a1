#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rset/distance.hpp"
#include "rset/error.hpp"
#include "rset/grid.hpp"
#include "rset/rng.hpp"

using namespace rset;

namespace {

constexpr std::int64_t kFarOracle = std::numeric_limits<std::int64_t>::max() / 4;

// O(N^2) reference: for every cell, scan all true cells.
std::vector<std::int64_t> brute_squared(const BinaryMask& mask) {
  const GridDomain& d = mask.domain();
  std::vector<std::int64_t> out(d.cell_count(), kFarOracle);
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i) {
      std::int64_t best = kFarOracle;
      for (int q = 0; q < d.ny; ++q) {
        for (int p = 0; p < d.nx; ++p) {
          if (!mask.at(p, q)) continue;
          std::int64_t di = i - p, dj = j - q;
          best = std::min(best, di * di + dj * dj);
        }
      }
      out[d.index(i, j)] = best;
    }
  }
  return out;
}

BinaryMask brute_dilate(const BinaryMask& mask, double delta) {
  BinaryMask out(mask.domain());
  if (!mask.any()) return out;
  std::vector<std::int64_t> sq = brute_squared(mask);
  const double h = mask.domain().h;
  for (std::size_t k = 0; k < sq.size(); ++k)
    out.set_index(k, h * std::sqrt(double(sq[k])) <= delta);
  return out;
}

bool subset(const BinaryMask& inner, const BinaryMask& outer) {
  for (std::size_t k = 0; k < inner.domain().cell_count(); ++k)
    if (inner[k] && !outer[k]) return false;
  return true;
}

// Smallest delta from the attained distance values such that each mask lies
// inside the other's dilation; the classical Hausdorff definition on a grid.
double dilation_hausdorff(const BinaryMask& a, const BinaryMask& b) {
  std::vector<std::int64_t> da = brute_squared(a);
  std::vector<std::int64_t> db = brute_squared(b);
  const double h = a.domain().h;
  std::vector<double> candidates{0.0};
  for (std::int64_t v : da) candidates.push_back(h * std::sqrt(double(v)));
  for (std::int64_t v : db) candidates.push_back(h * std::sqrt(double(v)));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  auto covers = [&](double delta) {
    return subset(a, brute_dilate(b, delta)) && subset(b, brute_dilate(a, delta));
  };
  std::size_t lo = 0, hi = candidates.size() - 1;
  REQUIRE(covers(candidates[hi]));
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (covers(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return candidates[lo];
}

BinaryMask random_mask(const GridDomain& d, double density, Rng& rng) {
  BinaryMask mask(d);
  for (std::size_t k = 0; k < d.cell_count(); ++k) mask.set_index(k, rng.uniform01() < density);
  return mask;
}

BinaryMask nonempty_random_mask(const GridDomain& d, double density, Rng& rng) {
  while (true) {
    BinaryMask m = random_mask(d, density, rng);
    if (m.any()) return m;
  }
}

}  // namespace

TEST_CASE("distance transform matches the brute-force oracle") {
  GridDomain d{0.0, 0.0, 0.25, 24, 24};
  Rng rng(2026, 1);
  for (double density : {0.02, 0.1, 0.5, 0.9}) {
    for (int rep = 0; rep < 10; ++rep) {
      BinaryMask mask = nonempty_random_mask(d, density, rng);
      CHECK(distance_transform_squared(mask) == brute_squared(mask));
    }
  }
}

TEST_CASE("distance transform handles structured masks") {
  GridDomain d{0.0, 0.0, 1.0, 31, 17};
  BinaryMask single(d);
  single.set(30, 16, true);
  CHECK(distance_transform_squared(single) == brute_squared(single));

  BinaryMask corners(d);
  corners.set(0, 0, true);
  corners.set(30, 0, true);
  CHECK(distance_transform_squared(corners) == brute_squared(corners));

  BinaryMask row(d);
  for (int i = 0; i < d.nx; ++i) row.set(i, 8, true);
  CHECK(distance_transform_squared(row) == brute_squared(row));

  BinaryMask checker(d);
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) checker.set(i, j, (i + j) % 2 == 0);
  CHECK(distance_transform_squared(checker) == brute_squared(checker));
}

TEST_CASE("distance transform scales by h and rejects empty input") {
  GridDomain d{-1.0, 2.0, 0.125, 9, 5};
  BinaryMask mask(d);
  mask.set(4, 2, true);
  ScalarField dist = distance_transform(mask);
  CHECK(dist.at(4, 2) == 0.0);
  CHECK(dist.at(5, 2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(dist.at(4, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(dist.at(6, 4) == doctest::Approx(0.125 * std::sqrt(8.0)).epsilon(1e-15));

  BinaryMask empty(d);
  CHECK_THROWS_WITH_AS(distance_transform(empty), doctest::Contains("empty"), Error);
}

TEST_CASE("one-dimensional grids transform exactly") {
  GridDomain d{0.0, 0.0, 0.5, 41, 1};
  Rng rng(7, 0);
  for (int rep = 0; rep < 20; ++rep) {
    BinaryMask mask = nonempty_random_mask(d, 0.15, rng);
    CHECK(distance_transform_squared(mask) == brute_squared(mask));
  }
}

TEST_CASE("dilate thresholds the exact transform") {
  GridDomain d{0.0, 0.0, 0.1, 20, 20};
  Rng rng(11, 0);
  for (int rep = 0; rep < 10; ++rep) {
    BinaryMask mask = nonempty_random_mask(d, 0.08, rng);
    for (double delta : {0.0, 0.1, 0.15, 0.2, 0.55, 3.0}) {
      CHECK(dilate(mask, delta) == brute_dilate(mask, delta));
    }
  }
  BinaryMask empty(d);
  CHECK_FALSE(dilate(empty, 1.0).any());
  CHECK_THROWS_AS(dilate(empty, -0.5), Error);
}

TEST_CASE("hausdorff equals the dilation definition") {
  GridDomain d{0.0, 0.0, 0.2, 18, 14};
  Rng rng(2026, 2);
  for (int rep = 0; rep < 12; ++rep) {
    BinaryMask a = nonempty_random_mask(d, 0.1, rng);
    BinaryMask b = nonempty_random_mask(d, 0.1, rng);
    double viaTransforms = hausdorff(a, b);
    double viaDilation = dilation_hausdorff(a, b);
    CHECK(viaTransforms == doctest::Approx(viaDilation).epsilon(1e-12));
  }
}

TEST_CASE("hausdorff basics") {
  GridDomain d{0.0, 0.0, 1.0, 10, 10};
  BinaryMask a(d);
  a.set(2, 2, true);
  BinaryMask b(d);
  b.set(7, 2, true);
  CHECK(hausdorff(a, a) == 0.0);
  CHECK(hausdorff(a, b) == doctest::Approx(5.0));
  CHECK(hausdorff(a, b) == hausdorff(b, a));

  BinaryMask empty(d);
  CHECK_THROWS_AS(hausdorff(a, empty), Error);
}

TEST_CASE("oriented distance keeps the half-cell interface convention") {
  GridDomain d{0.0, 0.0, 0.5, 12, 12};
  BinaryMask disc(d);
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) {
      Point p = coord_of(d, i, j);
      disc.set(i, j, std::hypot(p.x - 3.0, p.y - 3.0) <= 1.4);
    }
  ScalarField b = oriented_distance(disc);

  // {b <= 0} recovers the mask exactly, cells straddling the interface sit at
  // +-h/2, and adjacent cells never differ by more than the step length.
  for (std::size_t k = 0; k < d.cell_count(); ++k) {
    CHECK((b[k] <= 0.0) == disc[k]);
  }
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i + 1 < d.nx; ++i) {
      if (disc.at(i, j) != disc.at(i + 1, j)) {
        double inside = disc.at(i, j) ? b.at(i, j) : b.at(i + 1, j);
        double outside = disc.at(i, j) ? b.at(i + 1, j) : b.at(i, j);
        CHECK(inside == doctest::Approx(-0.25).epsilon(1e-12));
        CHECK(outside >= 0.25 - 1e-12);
      }
      CHECK(std::abs(b.at(i + 1, j) - b.at(i, j)) <= 0.5 + 1e-12);
    }
  }
}

TEST_CASE("oriented distance is antisymmetric under complement") {
  GridDomain d{0.0, 0.0, 0.25, 16, 16};
  Rng rng(5, 3);
  for (int rep = 0; rep < 8; ++rep) {
    BinaryMask mask = random_mask(d, 0.3, rng);
    if (!mask.any() || mask.all()) continue;
    ScalarField b = oriented_distance(mask);
    ScalarField bc = oriented_distance(complement(mask));
    for (std::size_t k = 0; k < d.cell_count(); ++k) CHECK(b[k] == -bc[k]);
  }
}

TEST_CASE("oriented distance rejects degenerate masks") {
  GridDomain d{0.0, 0.0, 1.0, 4, 4};
  CHECK_THROWS_AS(oriented_distance(BinaryMask(d, false)), Error);
  CHECK_THROWS_AS(oriented_distance(BinaryMask(d, true)), Error);
}
