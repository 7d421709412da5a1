#pragma once

#include <cstdint>
#include <vector>

#include "rset/grid.hpp"

namespace rset {

// Exact squared Euclidean distances to the nearest true cell centre, in units
// of h^2 (so every entry is an integer). Two-pass lower-envelope transform;
// output is identical to the O(N^2) brute-force minimum. Throws empty_set if
// the mask has no true cell.
std::vector<std::int64_t> distance_transform_squared(const BinaryMask& mask);

// Exact Euclidean distance to the nearest true cell centre, in domain units.
ScalarField distance_transform(const BinaryMask& mask);

// Oriented distance to the set interface, negative on the set and positive off
// it. The interface is modelled as running halfway between a boundary cell and
// its outside neighbour:
//
//   b(x) = d_A(x) - h/2         for x off the set,
//   b(x) = -(d_{A^c}(x) - h/2)  for x on it,
//
// with the complement taken relative to the grid window. This keeps the grid
// function Lipschitz-1 across adjacent cells (the raw difference of the two
// transforms jumps by 2h at every interface), stays within one cell of the
// continuum value, and satisfies {b <= 0} = mask exactly. Throws
// degenerate_boundary if the mask is all-true or all-false.
ScalarField oriented_distance(const BinaryMask& mask);

// Hausdorff distance between two nonempty masks on a common grid: the maximum
// over cells of |d_A - d_B|, which on a grid equals the classical smallest
// mutual dilation radius.
double hausdorff(const BinaryMask& a, const BinaryMask& b);

}  // namespace rset
