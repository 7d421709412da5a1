#pragma once

#include <utility>
#include <vector>

#include "rset/grid.hpp"

namespace rset {

// Level range [p1, p2]; p1 may be -infinity to describe a plain sublevel set.
struct LevelSpec {
  double p1;
  double p2;
  double boundary_tol = 0.0;

  void validate() const;
};

// Diagnostic report for the two closure conditions a level value must satisfy
// for plug-in level sets to behave: near-level cells need a strictly-below
// neighbour (condition A) and a strictly-above neighbour (condition B).
// Failures flag flat patches and local extrema sitting on the level set.
struct ConsistencyReport {
  std::vector<std::pair<int, int>> condA_violations;
  std::vector<std::pair<int, int>> condB_violations;
  bool satisfied_A = true;
  bool satisfied_B = true;
};

// {f <= p}, closed inequality.
BinaryMask sublevel_set(const ScalarField& f, double p);

// {p1 <= f <= p2}, closed inequalities.
BinaryMask level_band(const ScalarField& f, const LevelSpec& spec);

// {f = p} at grid scale: |f - p| <= tol, and by default also any cell with a
// 4-neighbour strictly on the other side of p (sign-change capture, so level
// sets that thread between cell centres are not lost).
BinaryMask level_boundary(const ScalarField& f, double p, double tol,
                          bool capture_sign_changes = true);

// Classifies every cell with |f - p| <= tol against its 8-neighbourhood.
ConsistencyReport check_consistency(const ScalarField& f, double p, double tol);

// True iff forward differences along the lattice direction nearest to e0 are
// strictly positive everywhere they exist. e0 must be a unit vector.
bool directional_monotonicity(const ScalarField& f, double e0x, double e0y);

}  // namespace rset
