#pragma once

#include <cstdint>
#include <vector>

#include "mvq/core_stats.hpp"
#include "mvq/mesh.hpp"
#include "mvq/rng.hpp"

namespace mvq {

enum class BootstrapStyle { parametric, nonparametric };
enum class CiMethod { percentile, bias_corrected, bca };

struct BootstrapConfig {
  std::size_t b = 1000;
  BootstrapStyle style = BootstrapStyle::nonparametric;
  CiMethod ci_method = CiMethod::percentile;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PercentileRequest {
  std::vector<double> gammas;

  void validate() const;  // sorted ascending, each in (0,1)
};

/// One bootstrap draw. Nonparametric: n rows with replacement, retried up to
/// 100 times if a column degenerates to zero variance (the standardize step
/// would fail), then DegenerateResampleError. Parametric: n draws from
/// MVN(0, sample_cov(data)) -- callers pass standardized data, per the
/// printed procedure.
DataMatrix resample(const DataMatrix& data, BootstrapStyle style, Rng& rng);

/// Empirical quantiles at each gamma, linear interpolation between order
/// statistics (type-7 convention).
std::vector<double> percentile_ci(std::vector<double> replicates,
                                  const PercentileRequest& request);

struct CiResult {
  std::vector<double> values;        // one per requested gamma
  bool percentile_fallback = false;  // z0 was infinite; plain percentile used
};

/// Bias-corrected and accelerated interval. An empty jackknife vector sets
/// the acceleration to zero (plain bias-corrected). Degenerate replicate
/// distributions (all on one side of theta_hat) fall back to percentile_ci
/// with the flag set.
CiResult bca_ci(std::vector<double> replicates, double theta_hat,
                const std::vector<double>& jackknife_values,
                const PercentileRequest& request);

/// Unified dispatch over the three interval methods.
CiResult bootstrap_ci(std::vector<double> replicates, CiMethod method,
                      double theta_hat, const std::vector<double>& jackknife_values,
                      const PercentileRequest& request);

/// BCa percentile-level adjustment: Phi(z0 + (z0 + z_gamma)/(1 - a (z0 + z_gamma))).
double bca_adjusted_level(double z0, double a, double gamma);

/// Jackknife acceleration from leave-one-out statistic values.
double jackknife_acceleration(const std::vector<double>& jackknife_values);

/// Elementwise empirical quantile across the bootstrap dimension of a stack
/// of identically shaped grids; outputs clamped to [0,1] when every input
/// lies in [0,1].
std::vector<CdfGrid> tensor_percentile(const std::vector<CdfGrid>& stack,
                                       const PercentileRequest& request);

namespace detail {
/// Type-7 quantile of an unsorted buffer (sorts in place).
double quantile_type7(std::vector<double>& vals, double gamma);
/// Same on a sorted range.
double quantile_type7_sorted(const double* sorted, std::size_t n, double gamma);
}  // namespace detail

}  // namespace mvq
