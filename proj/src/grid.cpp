#include "rset/grid.hpp"

#include <cmath>
#include <string>

namespace rset {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::bad_usage: return "bad usage";
    case Errc::bad_input: return "bad input";
    case Errc::io_error: return "io error";
    case Errc::empty_set: return "empty set";
    case Errc::degenerate_boundary: return "degenerate boundary";
    case Errc::domain_mismatch: return "domain mismatch";
    case Errc::empty_stack: return "empty stack";
    case Errc::stack_too_small: return "stack too small";
    case Errc::empty_window: return "empty window";
    case Errc::unsupported_model: return "unsupported model";
    case Errc::unsupported_domain: return "unsupported domain";
    case Errc::rank_deficient: return "rank deficient";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::domain_violation: return "domain violation";
    case Errc::not_psd: return "not positive semidefinite";
  }
  return "error";
}

void GridDomain::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) fail(Errc::bad_input, "grid spacing must be positive and finite");
  if (nx < 1 || ny < 1) fail(Errc::bad_input, "grid dims must be at least 1x1");
  if (!std::isfinite(x0) || !std::isfinite(y0)) fail(Errc::bad_input, "grid origin must be finite");
}

Point coord_of(const GridDomain& domain, int i, int j) {
  if (i < 0 || i >= domain.nx || j < 0 || j >= domain.ny)
    fail(Errc::bad_input, "cell index (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
  return Point{domain.x0 + i * domain.h, domain.y0 + j * domain.h};
}

BinaryMask::BinaryMask(const GridDomain& domain, bool fill)
    : domain_(domain), cells_(domain.cell_count(), fill ? 1 : 0) {
  domain_.validate();
}

void BinaryMask::check_bounds(int i, int j) const {
  if (i < 0 || i >= domain_.nx || j < 0 || j >= domain_.ny)
    fail(Errc::bad_input, "mask index out of range");
}

bool BinaryMask::at(int i, int j) const {
  check_bounds(i, j);
  return cells_[domain_.index(i, j)] != 0;
}

void BinaryMask::set(int i, int j, bool value) {
  check_bounds(i, j);
  cells_[domain_.index(i, j)] = value ? 1 : 0;
}

std::size_t BinaryMask::count_true() const {
  std::size_t n = 0;
  for (std::uint8_t c : cells_) n += c;
  return n;
}

bool BinaryMask::any() const {
  for (std::uint8_t c : cells_)
    if (c) return true;
  return false;
}

bool BinaryMask::all() const {
  for (std::uint8_t c : cells_)
    if (!c) return false;
  return true;
}

ScalarField::ScalarField(const GridDomain& domain, double fill)
    : domain_(domain), values_(domain.cell_count(), fill) {
  domain_.validate();
}

ScalarField::ScalarField(const GridDomain& domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  domain_.validate();
  if (values_.size() != domain_.cell_count())
    fail(Errc::dimension_mismatch, "field values do not match grid dims");
}

void ScalarField::check_bounds(int i, int j) const {
  if (i < 0 || i >= domain_.nx || j < 0 || j >= domain_.ny)
    fail(Errc::bad_input, "field index out of range");
}

double ScalarField::at(int i, int j) const {
  check_bounds(i, j);
  return values_[domain_.index(i, j)];
}

void ScalarField::set(int i, int j, double value) {
  check_bounds(i, j);
  values_[domain_.index(i, j)] = value;
}

void ScalarField::validate_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) fail(Errc::bad_input, "field contains a non-finite value");
}

BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out(mask.domain());
  const auto& src = mask.cells();
  for (std::size_t k = 0; k < src.size(); ++k) out.set_index(k, src[k] == 0);
  return out;
}

void require_same_domain(const GridDomain& a, const GridDomain& b, const char* what) {
  if (!a.same_as(b)) fail(Errc::domain_mismatch, std::string(what) + ": grids differ");
}

}  // namespace rset
