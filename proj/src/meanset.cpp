#include "rset/meanset.hpp"

#include <cmath>

#include "rset/error.hpp"
#include "rset/levelset.hpp"
#include "rset/models.hpp"

namespace rset {

const GridDomain& SampleStack::domain() const {
  if (fields.empty()) fail(Errc::empty_stack, "sample stack has no fields");
  return fields.front().domain();
}

void SampleStack::validate(bool check_lipschitz) const {
  if (fields.empty()) fail(Errc::empty_stack, "sample stack has no fields");
  const GridDomain& d = fields.front().domain();
  d.validate();
  for (int i = 0; i < size(); ++i) {
    if (!fields[i].domain().same_as(d))
      fail(Errc::domain_mismatch, "stack field " + std::to_string(i) +
                                      " is on a different grid than field 0");
    fields[i].validate_finite();
    if (check_lipschitz && !odf_lipschitz_ok(fields[i]))
      fail(Errc::bad_input, "stack field " + std::to_string(i) +
                                " violates the oriented-distance Lipschitz bound");
  }
}

bool odf_lipschitz_ok(const ScalarField& field, double tol) {
  const GridDomain& d = field.domain();
  double limit_axis = d.h + tol;
  double limit_diag = d.h * std::sqrt(2.0) + tol;
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i) {
      double v = field[d.index(i, j)];
      if (i + 1 < d.nx && std::abs(field[d.index(i + 1, j)] - v) > limit_axis) return false;
      if (j + 1 < d.ny) {
        if (std::abs(field[d.index(i, j + 1)] - v) > limit_axis) return false;
        if (i + 1 < d.nx && std::abs(field[d.index(i + 1, j + 1)] - v) > limit_diag)
          return false;
        if (i > 0 && std::abs(field[d.index(i - 1, j + 1)] - v) > limit_diag) return false;
      }
    }
  }
  return true;
}

ScalarField mean_odf(const SampleStack& stack) {
  stack.validate();
  const GridDomain& d = stack.domain();
  ScalarField mean(d, 0.0);
  for (const ScalarField& f : stack.fields) {
    for (std::size_t k = 0; k < d.cell_count(); ++k) mean[k] += f[k];
  }
  double inv = 1.0 / stack.size();
  for (std::size_t k = 0; k < d.cell_count(); ++k) mean[k] *= inv;
  return mean;
}

BinaryMask empirical_mean_set(const SampleStack& stack) {
  return sublevel_set(mean_odf(stack), 0.0);
}

BinaryMask empirical_mean_boundary(const SampleStack& stack, double tol) {
  return level_boundary(mean_odf(stack), 0.0, tol, true);
}

ScalarField sample_mean_odf(const RandomSetModel& model, const GridDomain& domain,
                            int n, std::uint64_t seed) {
  if (n < 1) fail(Errc::bad_input, "sample count must be at least 1");
  ScalarField mean(domain, 0.0);
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, stream_index(StreamClass::sample, static_cast<std::uint64_t>(i)));
    ScalarField f = sample_odf(model, domain, rng);
    for (std::size_t k = 0; k < domain.cell_count(); ++k) mean[k] += f[k];
  }
  double inv = 1.0 / n;
  for (std::size_t k = 0; k < domain.cell_count(); ++k) mean[k] *= inv;
  return mean;
}

}  // namespace rset
