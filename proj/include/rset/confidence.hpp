#pragma once

#include <cstdint>
#include <string>

#include "rset/grid.hpp"
#include "rset/meanset.hpp"
#include "rset/models.hpp"

namespace rset {

// One draw of the fluctuation field (a bootstrap replicate or a Gaussian-field
// draw), sampled on the grid.
using FluctuationSample = ScalarField;

// Simultaneous sup-quantiles of the fluctuation field over a window.
//   q1  : (1-alpha) quantile of max Z         (one-sided regions)
//   q2  : (1-alpha) quantile of max |Z|       (two-sided regions)
//   q21 : alpha/2 quantile of min Z           (asymmetric lower edge)
//   q22 : (1-alpha/2) quantile of max Z       (asymmetric upper edge)
// Each se_* is the Monte-Carlo standard error of the matching quantile
// (binomial order-statistic formula); it is +infinity when replicates == 1.
struct QuantileReport {
  double alpha = 0.05;
  double q1 = 0.0;
  double q2 = 0.0;
  double q21 = 0.0;
  double q22 = 0.0;
  int replicates = 0;
  double se_q1 = 0.0;
  double se_q2 = 0.0;
  double se_q21 = 0.0;
  double se_q22 = 0.0;
  std::uint64_t seed = 0;
  std::string window_id;
};

// Flat JSON object; non-finite standard errors serialize as null.
std::string quantile_report_to_json(const QuantileReport& report);
QuantileReport quantile_report_from_json(const std::string& text);

// Assembles a report from recorded per-replicate sups: quantiles are order
// statistics at 1-based index ceil(level * B). The three vectors must have
// equal length B >= 1 and hold, per replicate, max Z, max |Z| and min Z.
QuantileReport quantile_report_from_sups(std::vector<double> maxs, std::vector<double> absmaxs,
                                         std::vector<double> mins, double alpha,
                                         std::uint64_t seed, std::string window_id);

// Nonparametric bootstrap of the mean-ODF fluctuation sqrt(n)(mean* - mean).
// Replicate b resamples the stack with replacement on substream b and records
// the max, max-abs and min of the replicate field over the window. Quantiles
// are order statistics at ceil(level*B), 1-based.
QuantileReport bootstrap_quantiles(const SampleStack& stack, const BinaryMask& window,
                                   double alpha, int B, std::uint64_t seed);

// Same quantile extraction from S independent draws of a limiting fluctuation
// field, evaluated at the window's cell centres.
QuantileReport mc_sup_quantile(const FluctuationSampler& sampler, const BinaryMask& window,
                               double alpha, int S, std::uint64_t seed);

// window ∩ {fhat <= p + q1/sqrt(n)}.
BinaryMask ci_sublevel(const ScalarField& fhat, int n, double p, double q1,
                       const BinaryMask& window);

// window ∩ {p1 - q2/sqrt(n) <= fhat <= p2 + q2/sqrt(n)}.
BinaryMask ci_band(const ScalarField& fhat, int n, double p1, double p2, double q2,
                   const BinaryMask& window);

// window ∩ {p1 + q21/sqrt(n) <= fhat <= p2 + q22/sqrt(n)}; q21 is normally
// negative, so the band still widens on both sides.
BinaryMask ci_band_asym(const ScalarField& fhat, int n, double p1, double p2, double q21,
                        double q22, const BinaryMask& window);

// Confidence regions for the expected set {E b <= 0} and expected boundary
// {E b = 0}, thresholding the stack's mean ODF at q/sqrt(n).
BinaryMask ci_mean_set(const SampleStack& stack, double q1, const BinaryMask& window);
BinaryMask ci_mean_boundary(const SampleStack& stack, double q2, const BinaryMask& window);

enum class CoverageTarget { mean_set, mean_boundary };

// Fraction of independent trials in which the truth mask (zero sublevel set or
// zero level boundary of the model's estimand field) lies entirely inside the
// trial's confidence mask. Each trial simulates n samples on its own
// substream and calibrates with bootstrap_quantiles(B), unless
// exact_quantiles is given, in which case those quantiles are reused in every
// trial and no bootstrap runs. A null window means the whole grid.
// For disc_random_centre_square the plug-in estimator is the disc around the
// mean simulated centre rather than the mean ODF, matching its estimand.
double coverage_experiment(const RandomSetModel& model, const GridDomain& domain, int n,
                           int trials, double alpha, int B, std::uint64_t seed,
                           CoverageTarget target, const BinaryMask* window = nullptr,
                           const QuantileReport* exact_quantiles = nullptr);

// Sample covariance (denominator n-1) between the stack's ODF values at cells
// (ia, ja) and (ib, jb); estimates the limit fluctuation covariance at the two
// cell centres.
double empirical_fluctuation_cov(const SampleStack& stack, int ia, int ja, int ib, int jb);

}  // namespace rset
