#pragma once

#include <cstdint>

#include "mvq/mvn.hpp"

namespace mvq {

/// The point of a CDF-based quantile surface with maximal density. In the
/// standardized domain all coordinates equal equicoordinate_value.
struct CriticalPoint {
  Vector point;                // original (model) domain
  double tau = 0.0;
  double equicoordinate_value = 0.0;  // standardized domain
};

/// Sandwich for the joint quantile probability of concurrent individual
/// quantiles: lower <= independent_case <= upper.
struct ProbabilityBounds {
  double lower = 0.0;
  double upper = 1.0;
  double independent_case = 0.0;
};

enum class AdjustMode { independent, bonferroni };

/// F(Q(tau_i) * 1_q ; 0, corr): the CDF value at the concurrent univariate
/// quantile point.
double joint_quantile_probability(double tau_individual, const CorrelationMatrix& corr,
                                  const CdfAccuracy& acc = {});
double joint_quantile_probability(double tau_individual, const Matrix& corr,
                                  const CdfAccuracy& acc = {});

ProbabilityBounds bonferroni_bounds(double tau_individual, std::size_t q);

/// Individual quantile probability needed to hold a joint value of tau_joint.
double adjusted_individual_tau(double tau_joint, std::size_t q, AdjustMode mode);

/// Scalar v with F(v * 1_q ; 0, corr) = tau.
double equicoordinate_quantile(double tau, const CorrelationMatrix& corr,
                               const CdfAccuracy& acc = {});
double equicoordinate_quantile(double tau, const Matrix& corr,
                               const CdfAccuracy& acc = {});

/// Equicoordinate solve in the standardized domain mapped back through the
/// model's per-axis scale and mean.
CriticalPoint critical_point(double tau, const MvnModel& model,
                             const CdfAccuracy& acc = {});

struct CoverageEstimate {
  double beta_hat = 0.0;
  double std_error = 0.0;
  std::size_t n_mc = 0;
};

/// Monte Carlo estimate of the population fraction dominated by the quantile
/// surface Q(tau): fraction of samples x with F(x) <= tau (boundary
/// inclusive). Satisfies beta >= tau.
CoverageEstimate estimate_coverage_beta(const MvnModel& model, double tau,
                                        std::size_t n_mc, std::uint64_t seed,
                                        const CdfAccuracy& acc = {});

}  // namespace mvq
