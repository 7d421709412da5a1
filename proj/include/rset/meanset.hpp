#pragma once

#include <cstdint>
#include <vector>

#include "rset/grid.hpp"

namespace rset {

struct RandomSetModel;

// An ordered sample of oriented-distance fields on a common grid.
struct SampleStack {
  std::vector<ScalarField> fields;

  int size() const { return static_cast<int>(fields.size()); }
  const GridDomain& domain() const;
  // Checks the common-domain invariant and, optionally, that every member
  // obeys the grid Lipschitz bound for oriented distance functions.
  void validate(bool check_lipschitz = false) const;
};

// True iff adjacent-cell differences never exceed the cell spacing (times the
// step length for diagonals), within tol.
bool odf_lipschitz_ok(const ScalarField& field, double tol = 1e-12);

// Cellwise arithmetic mean of the stack, summed in sample order.
ScalarField mean_odf(const SampleStack& stack);

// {mean <= 0} and {mean = 0} (the latter with tolerance plus sign-change
// capture, see levelset.hpp).
BinaryMask empirical_mean_set(const SampleStack& stack);
BinaryMask empirical_mean_boundary(const SampleStack& stack, double tol);

// The pointwise expectation of the model's oriented distance function,
// evaluated at cell centres: closed forms where available, otherwise adaptive
// quadrature over the model's scalar randomness (relative error 1e-8).
ScalarField expected_odf(const RandomSetModel& model, const GridDomain& domain);

// Mean ODF of n freshly simulated samples without materializing the stack;
// identical (cell for cell) to mean_odf(sample_stack(model, domain, n, seed)).
ScalarField sample_mean_odf(const RandomSetModel& model, const GridDomain& domain,
                            int n, std::uint64_t seed);

}  // namespace rset
