#pragma once

#include <cstdint>
#include <vector>

#include "mvq/core_stats.hpp"

namespace mvq {

struct QqEnvelope {
  std::vector<double> lower;        // per sorted rank
  std::vector<double> theoretical;  // chi-square quantiles at (i - 0.5)/n
  std::vector<double> upper;
};

/// Monte Carlo confidence envelope for sorted squared Mahalanobis distances
/// of n standard q-variate normal samples.
QqEnvelope qq_envelope(std::size_t n, std::size_t q, double confidence,
                       std::size_t n_mc, std::uint64_t seed);

struct GofTest {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// Anderson-Darling test of d against a fully specified chi-square(dof);
/// p-value from the case-0 limiting law with finite-n correction.
GofTest ad_test_chisq(const std::vector<double>& d, int dof);

/// One-sample Kolmogorov-Smirnov against chi-square(dof); asymptotic
/// Kolmogorov p-value at the finite-n-corrected argument.
GofTest ks_test_chisq(const std::vector<double>& d, int dof);

}  // namespace mvq
