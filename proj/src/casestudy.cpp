#include "mvq/casestudy.hpp"

#include <algorithm>

#include "mvq/parallel.hpp"

namespace mvq {

void SrsEnsemble::validate() const {
  if (frequencies.empty() || frequencies.size() != data.size())
    throw InvalidInputError("SrsEnsemble: frequency/data size mismatch");
  for (std::size_t i = 1; i < frequencies.size(); ++i)
    if (!(frequencies[i] > frequencies[i - 1]))
      throw InvalidInputError("SrsEnsemble: frequencies must strictly increase");
  std::size_t n = data.front().n(), q = data.front().q();
  for (const auto& d : data)
    if (d.n() != n || d.q() != q)
      throw InvalidInputError("SrsEnsemble: all frequencies must share n and q");
  if (!axis_labels.empty() && axis_labels.size() != q)
    throw InvalidInputError("SrsEnsemble: axis label count != q");
}

std::vector<SpecificationLine> run_case_study(const SrsEnsemble& ensemble, double tau,
                                              double confidence,
                                              const BootstrapConfig& config,
                                              const CdfAccuracy& acc) {
  ensemble.validate();
  if (!(tau > 0.0 && tau < 1.0) || !(confidence > 0.0 && confidence < 1.0))
    throw InvalidInputError("run_case_study: tau/confidence must lie in (0,1)");
  const std::size_t nf = ensemble.frequencies.size();
  std::vector<SpecificationLine> lines(nf);

  PercentileRequest request{{confidence}};
  for (std::size_t f = 0; f < nf; ++f) {
    SpecificationLine& line = lines[f];
    line.frequency = ensemble.frequencies[f];
    const DataMatrix& d = ensemble.data[f];
    try {
      if (d.n() <= d.q())
        throw InsufficientSamplesError("run_case_study: need n > q per frequency");

      // normality diagnostics (advisory, machine-readable)
      Vector dist = mahalanobis_sq_all(d);
      std::vector<double> dv(dist.data(), dist.data() + dist.size());
      line.normality.ad_p = ad_test_chisq(dv, static_cast<int>(d.q())).p_value;
      line.normality.ks_p = ks_test_chisq(dv, static_cast<int>(d.q())).p_value;
      QqEnvelope env = qq_envelope(d.n(), d.q(), 0.95, 2000,
                                   Rng::derive(config.seed, 900000 + f));
      std::sort(dv.begin(), dv.end());
      line.normality.qq_pass = true;
      for (std::size_t i = 0; i < dv.size(); ++i)
        if (dv[i] < env.lower[i] || dv[i] > env.upper[i]) line.normality.qq_pass = false;

      BootstrapConfig bc = config;
      bc.seed = Rng::derive(config.seed, f);
      CriticalPointCi ci = algorithm3_critical_point_ci(d, tau, request, bc, acc);
      line.critical_point_ci = ci.points.row(0).transpose();

      ToleranceSpec spec{tau, confidence, d.n()};
      Vector mean = sample_mean(d);
      Vector sd = sample_sd(d);
      line.univariate_tolerance.resize(static_cast<Eigen::Index>(d.q()));
      for (Eigen::Index j = 0; j < line.univariate_tolerance.size(); ++j)
        line.univariate_tolerance(j) = univariate_upper_tolerance(mean(j), sd(j), spec);
      line.bonferroni_tolerance = simultaneous_upper_tolerance(d, spec);
    } catch (const Error& e) {
      line.failed = true;
      line.error = e.what();
    }
  }
  return lines;
}

}  // namespace mvq
