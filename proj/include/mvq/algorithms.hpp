#pragma once

#include <cstdint>
#include <vector>

#include "mvq/bootstrap.hpp"
#include "mvq/mesh.hpp"
#include "mvq/quantile_core.hpp"

namespace mvq {

/// Bootstrap interval on the joint quantile probability of concurrent
/// univariate quantiles.
struct JointTauInterval {
  std::vector<double> gammas;
  std::vector<double> tau_values;  // one per gamma
  std::size_t b = 0;
  double tau_individual = 0.0;
  double theta_hat = 0.0;  // point estimate on the full data
  bool percentile_fallback = false;
};

/// Per-gamma quantile sets in the original domain, plus the percentile grids
/// (standardized domain) they were extracted from. Gammas are expressed in
/// the quantile direction: higher gamma = more conservative (outer) surface.
struct QuantileCiResult {
  double tau = 0.0;
  std::vector<double> gammas;
  std::vector<QuantileSet> gamma_sets;   // original domain
  std::vector<CdfGrid> gamma_grids;      // standardized domain, post-upsample
  Vector centering;
  Vector scaling;
  BootstrapConfig config;
  GridSpec grid;
  bool interpolated = false;
  std::size_t regularized_replicates = 0;
};

/// Per-gamma critical points in the original domain.
struct CriticalPointCi {
  double tau = 0.0;
  std::vector<double> gammas;
  Matrix points;  // gammas.size() rows, q columns
  std::size_t b = 0;
  Vector point_estimate;
  bool percentile_fallback = false;
};

/// Uncertainty on the joint quantile probability: per replicate, resample the
/// rows (always nonparametric, as printed), take the resample's correlation
/// matrix, and evaluate the CDF at the concurrent univariate quantile point.
JointTauInterval algorithm1_joint_tau_uq(const DataMatrix& data, double tau_individual,
                                         const PercentileRequest& request,
                                         const BootstrapConfig& config,
                                         const CdfAccuracy& acc = {});

/// Confidence intervals on CDF-based quantile contours / iso-surfaces via a
/// bootstrapped tessellated-CDF tensor. Replicate CDF grids are reduced
/// per cell (percentile / BC / BCa); the requested quantile-direction gamma
/// maps to the (1-gamma) percentile of the CDF values. stack_bytes caps the
/// in-flight slab of the replicate stack.
QuantileCiResult algorithm2_quantile_ci(const DataMatrix& data, double tau,
                                        const PercentileRequest& request,
                                        const BootstrapConfig& config,
                                        const GridSpec& grid, bool interpolate,
                                        const CdfAccuracy& acc = {},
                                        std::size_t stack_bytes = std::size_t(512) << 20);

/// Confidence intervals on the critical point: per replicate, resample,
/// standardize, solve the equicoordinate quantile on the resample's
/// correlation matrix, and map through the resample's own mean and per-axis
/// standard deviations.
CriticalPointCi algorithm3_critical_point_ci(const DataMatrix& data, double tau,
                                             const PercentileRequest& request,
                                             const BootstrapConfig& config,
                                             const CdfAccuracy& acc = {});

}  // namespace mvq
