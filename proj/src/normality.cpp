#include "mvq/normality.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "mvq/bootstrap.hpp"
#include "mvq/mvn.hpp"
#include "mvq/parallel.hpp"
#include "mvq/tolerance.hpp"

namespace mvq {

QqEnvelope qq_envelope(std::size_t n, std::size_t q, double confidence,
                       std::size_t n_mc, std::uint64_t seed) {
  if (n <= q) throw InvalidInputError("qq_envelope: need n > q");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidInputError("qq_envelope: confidence must lie in (0,1)");
  if (n_mc < 100) throw InvalidInputError("qq_envelope: n_mc too small");

  Matrix sorted(static_cast<Eigen::Index>(n_mc), static_cast<Eigen::Index>(n));
  MvnModel standard(Vector::Zero(static_cast<Eigen::Index>(q)),
                    Matrix::Identity(static_cast<Eigen::Index>(q),
                                     static_cast<Eigen::Index>(q)));
  parallel_for(n_mc, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      DataMatrix d = mvn_sample(standard, n, Rng::derive(seed, t));
      Vector m = mahalanobis_sq_all(d);
      std::sort(m.data(), m.data() + m.size());
      sorted.row(static_cast<Eigen::Index>(t)) = m.transpose();
    }
  });

  QqEnvelope env;
  env.lower.resize(n);
  env.upper.resize(n);
  env.theoretical.resize(n);
  double lo_g = (1.0 - confidence) / 2.0;
  double hi_g = (1.0 + confidence) / 2.0;
  std::vector<double> col(n_mc);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t t = 0; t < n_mc; ++t)
      col[t] = sorted(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(r));
    std::sort(col.begin(), col.end());
    env.lower[r] = detail::quantile_type7_sorted(col.data(), n_mc, lo_g);
    env.upper[r] = detail::quantile_type7_sorted(col.data(), n_mc, hi_g);
    env.theoretical[r] =
        chi_square_quantile((double(r) + 0.5) / double(n), static_cast<int>(q));
  }
  return env;
}

namespace {

/// Marsaglia & Marsaglia limiting distribution of the Anderson-Darling
/// statistic, with the finite-n correction term.
double ad_inf(double z) {
  if (z < 2.0)
    return std::exp(-1.2337141 / z) / std::sqrt(z) *
           (2.00012 +
            (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) * z);
  return std::exp(-std::exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z));
}

double ad_errfix(double n, double x) {
  if (x > 0.8)
    return (-130.2137 + (745.2337 - (1705.091 - (1950.646 - (1116.360 - 255.7844 * x) * x) * x) * x) * x) / n;
  double c = 0.01265 + 0.1757 / n;
  if (x < c) {
    double t = x / c;
    t = std::sqrt(t) * (1.0 - t) * (49.0 * t - 102.0);
    return t * (0.0037 / (n * n * n) + 0.00078 / (n * n) + 0.00006 / n);
  }
  double t = (x - c) / (0.8 - c);
  t = -0.00022633 + (6.54034 - (14.6538 - (14.458 - (8.259 - 1.91864 * t) * t) * t) * t) * t;
  return t * (0.04213 + 0.01365 / n) / n;
}

std::vector<double> chisq_cdf_sorted(const std::vector<double>& d, int dof) {
  if (d.size() < 5) throw InvalidInputError("gof test: need at least 5 values");
  for (double v : d)
    if (!std::isfinite(v)) throw InvalidInputError("gof test: non-finite value");
  std::vector<double> s = d;
  std::sort(s.begin(), s.end());
  boost::math::chi_squared dist(double(dof));
  std::vector<double> F(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    F[i] = boost::math::cdf(dist, std::max(0.0, s[i]));
  return F;
}

}  // namespace

GofTest ad_test_chisq(const std::vector<double>& d, int dof) {
  std::vector<double> F = chisq_cdf_sorted(d, dof);
  const double n = double(F.size());
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    double fi = std::clamp(F[i], 1e-300, 1.0 - 1e-16);
    double fr = std::clamp(F[F.size() - 1 - i], 1e-300, 1.0 - 1e-16);
    s += (2.0 * double(i + 1) - 1.0) * (std::log(fi) + std::log1p(-fr));
  }
  GofTest t;
  t.statistic = -n - s / n;
  double cdf = ad_inf(t.statistic);
  cdf += ad_errfix(n, cdf);
  t.p_value = std::clamp(1.0 - cdf, 0.0, 1.0);
  return t;
}

GofTest ks_test_chisq(const std::vector<double>& d, int dof) {
  std::vector<double> F = chisq_cdf_sorted(d, dof);
  const double n = double(F.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    dmax = std::max(dmax, double(i + 1) / n - F[i]);
    dmax = std::max(dmax, F[i] - double(i) / n);
  }
  GofTest t;
  t.statistic = dmax;
  double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * dmax;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  t.p_value = std::clamp(p, 0.0, 1.0);
  return t;
}

}  // namespace mvq
