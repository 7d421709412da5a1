#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rset/confidence.hpp"
#include "rset/grid.hpp"

namespace rset {

// One entry of the feature vector x~(x). `product` multiplies two coordinates
// (k == l squares one), the log term requires a strictly positive coordinate.
enum class FeatureKind { constant, coord, log_coord, product };

struct FeatureTerm {
  FeatureKind kind = FeatureKind::constant;
  int k = -1;
  int l = -1;
};

// Ordered feature list mapping a d-dimensional covariate point to the design
// row x~(x); the fitted field is beta . x~(x).
struct FeatureMap {
  int dims = 0;
  std::vector<FeatureTerm> terms;

  int size() const { return static_cast<int>(terms.size()); }
  void validate() const;
  // x~ at a covariate point (the second coordinate is ignored when dims == 1).
  std::vector<double> evaluate(double x, double y) const;
};

FeatureMap feature_map_from_json(const std::string& text);
std::string feature_map_to_json(const FeatureMap& fmap);

// Normal linear model fit. Sigma is (p+1)^2 row-major and equals
// sigma2 * (X'X)^-1, which already carries the 1/n scale of the fluctuation
// limit: confidence constructions add q/sqrt(n) with quantiles drawn from
// N(0, Sigma) directly.
struct FittedModel {
  std::vector<double> beta;
  double sigma2 = 0.0;
  std::vector<double> sigma;
  int n = 0;

  double sigma_at(int r, int c) const { return sigma[static_cast<std::size_t>(r) * beta.size() + c]; }
};

// Least squares via column-pivoted QR; sigma2 = RSS / (n - p - 1).
FittedModel ols_fit(const std::vector<std::vector<double>>& rows,
                    const std::vector<double>& response, const FeatureMap& fmap);

// sign * (beta . x~) at every cell centre; sign -1 flips the field so level
// sets of decreasing quantities can use the sublevel convention.
ScalarField predict_field(const FittedModel& model, const FeatureMap& fmap,
                          const GridDomain& domain, int sign = 1);

// Quantiles of sup Z . x~ over the window for Z ~ N(0, Sigma), drawn S times.
// When every term is constant, affine or a distinct-coordinate product, and
// the window is the full grid, each replicate's sup is taken over the four
// corner cells only (the field is coordinatewise monotone, so that is exact);
// allow_corner_shortcut = false forces the full scan.
QuantileReport gaussian_field_quantiles(const FittedModel& model, const FeatureMap& fmap,
                                        const BinaryMask& window, double alpha, int S,
                                        std::uint64_t seed, bool allow_corner_shortcut = true);

// ci_sublevel / ci_band over the predicted field, n taken from the fit.
BinaryMask covariate_region(const FittedModel& model, const FeatureMap& fmap,
                            const GridDomain& domain, double p, double q1,
                            const BinaryMask& window, int sign = 1);
BinaryMask covariate_region(const FittedModel& model, const FeatureMap& fmap,
                            const GridDomain& domain, double p1, double p2, double q2,
                            const BinaryMask& window, int sign = 1);

// Numeric table with named columns, from a CSV file with one header row.
struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  // Row-major selection of several columns, e.g. the covariate block.
  std::vector<std::vector<double>> select(const std::vector<std::string>& names) const;
};

Dataset read_csv(const std::string& path);

}  // namespace rset
