#pragma once

#include <string>
#include <vector>

#include "mvq/algorithms.hpp"
#include "mvq/normality.hpp"
#include "mvq/tolerance.hpp"

namespace mvq {

/// Per-frequency multivariate SRS observations; all frequencies share n and q.
struct SrsEnsemble {
  std::vector<double> frequencies;
  std::vector<DataMatrix> data;  // one matrix per frequency
  std::vector<std::string> axis_labels;

  void validate() const;
};

struct NormalityReport {
  double ad_p = 0.0;
  double ks_p = 0.0;
  bool qq_pass = false;
};

struct SpecificationLine {
  double frequency = 0.0;
  Vector critical_point_ci;    // one-sided, at the requested confidence
  Vector univariate_tolerance;
  Vector bonferroni_tolerance;
  NormalityReport normality;
  bool failed = false;         // line-level degeneracy diagnostics
  std::string error;
};

/// The pointwise multi-axis specification workflow: per frequency, normality
/// diagnostics (warn, never abort), the critical-point CI, and the tolerance
/// baselines. Degenerate data fails only the affected line.
std::vector<SpecificationLine> run_case_study(const SrsEnsemble& ensemble, double tau,
                                              double confidence,
                                              const BootstrapConfig& config,
                                              const CdfAccuracy& acc = {});

}  // namespace mvq
