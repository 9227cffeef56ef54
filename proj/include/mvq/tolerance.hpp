#pragma once

#include <cstdint>

#include "mvq/core_stats.hpp"

namespace mvq {

struct ToleranceSpec {
  double beta = 0.90;        // proportion of the population to cover
  double confidence = 0.95;  // 1 - alpha
  std::size_t n = 2;         // sample size behind the estimates

  void validate() const;
};

/// Exact one-sided normal tolerance factor k: the bound is mean + k * sd.
/// k = noncentral-t quantile(confidence; df = n-1, delta = sqrt(n) Phi^-1(beta)) / sqrt(n).
double tolerance_factor(const ToleranceSpec& spec);

/// One-sided upper tolerance bound for a single column.
double univariate_upper_tolerance(double sample_mean, double sample_sd,
                                  const ToleranceSpec& spec);

/// Per-column bounds at Bonferroni-adjusted confidence 1 - alpha/q.
Vector simultaneous_upper_tolerance(const DataMatrix& data, const ToleranceSpec& spec);

/// Threshold squared Mahalanobis distance r for the elliptical tolerance
/// region {x : mahal^2(x; xbar, S) <= r} with coverage >= beta at the stated
/// confidence. Monte Carlo over (sample mean, Wishart) draws; the per-draw
/// coverage threshold is the beta-quantile of an inner sample of the
/// quadratic form. Converges to the chi-square beta-quantile as n grows.
double tolerance_region_factor(std::size_t n, std::size_t q, double beta,
                               double confidence, std::size_t n_mc,
                               std::uint64_t seed, std::size_t n_inner = 10000);

double chi_square_quantile(double prob, int dof);

/// Noncentral-t quantile (series CDF inverted by root-bracketing).
double noncentral_t_quantile(double p, double df, double delta);

}  // namespace mvq
