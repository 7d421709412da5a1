#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rset/error.hpp"

namespace rset {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Rectangular discretization of a compact planar window. Cell (i, j) has its
// centre at (x0 + i*h, y0 + j*h); spacing is isotropic. One-dimensional data
// uses ny = 1. All set and field operations in this library are evaluated at
// cell centres only, which keeps them exactly testable against brute force.
struct GridDomain {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
  int nx = 1;
  int ny = 1;

  void validate() const;
  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }
  bool same_as(const GridDomain& o) const {
    return x0 == o.x0 && y0 == o.y0 && h == o.h && nx == o.nx && ny == o.ny;
  }
};

Point coord_of(const GridDomain& domain, int i, int j);

// A closed subset of the window, one in/out flag per cell centre.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(const GridDomain& domain, bool fill = false);

  const GridDomain& domain() const { return domain_; }
  bool at(int i, int j) const;
  void set(int i, int j, bool value);
  bool operator[](std::size_t idx) const { return cells_[idx] != 0; }
  void set_index(std::size_t idx, bool value) { cells_[idx] = value ? 1 : 0; }

  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::size_t count_true() const;
  bool any() const;
  bool all() const;
  bool operator==(const BinaryMask& o) const {
    return domain_.same_as(o.domain_) && cells_ == o.cells_;
  }

 private:
  GridDomain domain_;
  std::vector<std::uint8_t> cells_;
  void check_bounds(int i, int j) const;
};

// A real-valued function sampled at cell centres.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridDomain& domain, double fill = 0.0);
  ScalarField(const GridDomain& domain, std::vector<double> values);

  const GridDomain& domain() const { return domain_; }
  double at(int i, int j) const;
  void set(int i, int j, double value);
  double operator[](std::size_t idx) const { return values_[idx]; }
  double& operator[](std::size_t idx) { return values_[idx]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Throws bad_input if any value is non-finite.
  void validate_finite() const;

 private:
  GridDomain domain_;
  std::vector<double> values_;
  void check_bounds(int i, int j) const;
};

BinaryMask complement(const BinaryMask& mask);

// Euclidean dilation by a closed ball of radius delta, evaluated at cell
// centres: cell true iff some true source cell lies within distance delta.
// Implemented by thresholding the exact distance transform (see distance.hpp),
// so the two agree exactly for every mask and delta. An empty mask dilates to
// an empty mask.
BinaryMask dilate(const BinaryMask& mask, double delta);

void require_same_domain(const GridDomain& a, const GridDomain& b,
                         const char* what);

}  // namespace rset
