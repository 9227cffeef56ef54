#include "mvq/quantile_core.hpp"

#include <cmath>

#include "mvq/parallel.hpp"
#include "mvq/simd/kernels.hpp"
#include "internal_math.hpp"
#include "rootfind.hpp"

namespace mvq {

double joint_quantile_probability(double tau_individual, const Matrix& corr,
                                  const CdfAccuracy& acc) {
  if (!(tau_individual > 0.0 && tau_individual < 1.0))
    throw InvalidInputError("joint_quantile_probability: tau must lie in (0,1)");
  double z = detail::norm_quantile(tau_individual);
  Vector x = Vector::Constant(corr.rows(), z);
  return mvn_cdf_corr(x, corr, acc);
}

double joint_quantile_probability(double tau_individual, const CorrelationMatrix& corr,
                                  const CdfAccuracy& acc) {
  return joint_quantile_probability(tau_individual, corr.values(), acc);
}

ProbabilityBounds bonferroni_bounds(double tau_individual, std::size_t q) {
  if (!(tau_individual > 0.0 && tau_individual < 1.0) || q < 1)
    throw InvalidInputError("bonferroni_bounds: bad arguments");
  ProbabilityBounds b;
  b.lower = std::max(0.0, 1.0 - double(q) * (1.0 - tau_individual));
  b.upper = tau_individual;
  b.independent_case = std::pow(tau_individual, double(q));
  return b;
}

double adjusted_individual_tau(double tau_joint, std::size_t q, AdjustMode mode) {
  if (!(tau_joint > 0.0 && tau_joint < 1.0) || q < 1)
    throw InvalidInputError("adjusted_individual_tau: bad arguments");
  if (mode == AdjustMode::independent)
    return std::pow(tau_joint, 1.0 / double(q));
  return 1.0 - (1.0 - tau_joint) / double(q);
}

double equicoordinate_quantile(double tau, const Matrix& corr, const CdfAccuracy& acc) {
  if (!(tau > 0.0 && tau < 1.0))
    throw InvalidInputError("equicoordinate_quantile: tau must lie in (0,1)");
  const auto q = corr.rows();
  if (q == 1) return detail::norm_quantile(tau);
  auto g = [&](double v) {
    Vector x = Vector::Constant(q, v);
    return mvn_cdf_corr(x, corr, acc) - tau;
  };
  double lo = -10.0, hi = 10.0;
  double flo = g(lo), fhi = g(hi);
  int guard = 0;
  while (flo > 0.0 && lo > -40.0) { lo -= 10.0; flo = g(lo); ++guard; }
  while (fhi < 0.0 && hi < 40.0) { hi += 10.0; fhi = g(hi); ++guard; }
  if (flo > 0.0 || fhi < 0.0)
    throw NumericalError("equicoordinate_quantile: bracketing failed");
  (void)guard;
  return detail::brent_root(g, lo, hi, flo, fhi, 1e-7, 5000);
}

double equicoordinate_quantile(double tau, const CorrelationMatrix& corr,
                               const CdfAccuracy& acc) {
  return equicoordinate_quantile(tau, corr.values(), acc);
}

CriticalPoint critical_point(double tau, const MvnModel& model, const CdfAccuracy& acc) {
  Matrix corr = corr_from_cov(model.cov());
  double v = equicoordinate_quantile(tau, corr, acc);
  CriticalPoint cp;
  cp.tau = tau;
  cp.equicoordinate_value = v;
  cp.point = model.mean() + v * model.sigmas();
  return cp;
}

CoverageEstimate estimate_coverage_beta(const MvnModel& model, double tau,
                                        std::size_t n_mc, std::uint64_t seed,
                                        const CdfAccuracy& acc) {
  if (n_mc < 1) throw InvalidInputError("estimate_coverage_beta: n_mc must be positive");
  if (!(tau > 0.0 && tau < 1.0))
    throw InvalidInputError("estimate_coverage_beta: tau must lie in (0,1)");
  DataMatrix samples = mvn_sample(model, n_mc, seed);
  const Matrix corr = corr_from_cov(model.cov());
  const Vector mean = model.mean();
  const Vector sig = model.sigmas();
  const std::size_t q = model.q();

  std::size_t inside = 0;
  if (q == 1) {
    std::vector<double> z(n_mc), p(n_mc);
    for (std::size_t i = 0; i < n_mc; ++i)
      z[i] = (samples.values()(static_cast<Eigen::Index>(i), 0) - mean(0)) / sig(0);
    simd::kernels().norm_cdf_v(z.data(), p.data(), n_mc);
    for (std::size_t i = 0; i < n_mc; ++i) inside += (p[i] <= tau);
  } else if (q == 2) {
    std::vector<double> h(n_mc), k(n_mc), p(n_mc);
    for (std::size_t i = 0; i < n_mc; ++i) {
      h[i] = (samples.values()(static_cast<Eigen::Index>(i), 0) - mean(0)) / sig(0);
      k[i] = (samples.values()(static_cast<Eigen::Index>(i), 1) - mean(1)) / sig(1);
    }
    double rho = corr(0, 1);
    parallel_for(n_mc, [&](std::size_t lo, std::size_t hi) {
      simd::kernels().bvn_cdf_v(h.data() + lo, k.data() + lo, rho, p.data() + lo,
                                hi - lo);
    });
    for (std::size_t i = 0; i < n_mc; ++i) inside += (p[i] <= tau);
  } else {
    std::vector<std::size_t> counts(n_mc, 0);
    parallel_for(n_mc, [&](std::size_t lo, std::size_t hi) {
      Vector b(static_cast<Eigen::Index>(q));
      for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t j = 0; j < q; ++j)
          b(static_cast<Eigen::Index>(j)) =
              (samples.values()(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j)) -
               mean(static_cast<Eigen::Index>(j))) /
              sig(static_cast<Eigen::Index>(j));
        counts[i] = (mvn_cdf_corr(b, corr, acc) <= tau) ? 1 : 0;
      }
    });
    for (std::size_t i = 0; i < n_mc; ++i) inside += counts[i];
  }

  CoverageEstimate est;
  est.n_mc = n_mc;
  est.beta_hat = double(inside) / double(n_mc);
  est.std_error = std::sqrt(est.beta_hat * (1.0 - est.beta_hat) / double(n_mc));
  return est;
}

}  // namespace mvq
