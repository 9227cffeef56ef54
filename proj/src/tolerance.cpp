#include "mvq/tolerance.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_t.hpp>

#include "mvq/bootstrap.hpp"
#include "mvq/parallel.hpp"
#include "mvq/rng.hpp"
#include "mvq/simd/kernels.hpp"
#include "internal_math.hpp"

namespace mvq {

void ToleranceSpec::validate() const {
  if (!(beta > 0.0 && beta < 1.0))
    throw InvalidInputError("ToleranceSpec: beta must lie in (0,1)");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidInputError("ToleranceSpec: confidence must lie in (0,1)");
  if (n < 2) throw InvalidInputError("ToleranceSpec: n must be at least 2");
}

double noncentral_t_quantile(double p, double df, double delta) {
  if (!(p > 0.0 && p < 1.0))
    throw InvalidInputError("noncentral_t_quantile: p must lie in (0,1)");
  if (!(df > 0.0)) throw InvalidInputError("noncentral_t_quantile: df must be positive");
  try {
    boost::math::non_central_t dist(df, delta);
    return boost::math::quantile(dist, p);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("noncentral_t_quantile: ") + e.what());
  }
}

double tolerance_factor(const ToleranceSpec& spec) {
  spec.validate();
  double delta = std::sqrt(double(spec.n)) * detail::norm_quantile(spec.beta);
  return noncentral_t_quantile(spec.confidence, double(spec.n - 1), delta) /
         std::sqrt(double(spec.n));
}

double univariate_upper_tolerance(double sample_mean, double sample_sd,
                                  const ToleranceSpec& spec) {
  if (!(sample_sd > 0.0))
    throw InvalidInputError("univariate_upper_tolerance: sd must be positive");
  return sample_mean + tolerance_factor(spec) * sample_sd;
}

Vector simultaneous_upper_tolerance(const DataMatrix& data, const ToleranceSpec& spec) {
  spec.validate();
  ToleranceSpec adj = spec;
  double alpha = 1.0 - spec.confidence;
  adj.confidence = 1.0 - alpha / double(data.q());
  Vector mean = sample_mean(data);
  Vector sd = sample_sd(data);
  Vector out(static_cast<Eigen::Index>(data.q()));
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    if (!(sd(j) > 0.0))
      throw DegenerateColumnError("simultaneous_upper_tolerance: zero-variance column " +
                                      std::to_string(j),
                                  static_cast<std::size_t>(j));
    out(j) = mean(j) + tolerance_factor(adj) * sd(j);
  }
  return out;
}

double chi_square_quantile(double prob, int dof) {
  if (!(prob > 0.0 && prob < 1.0) || dof < 1)
    throw InvalidInputError("chi_square_quantile: bad arguments");
  try {
    boost::math::chi_squared dist(double(dof));
    double v = boost::math::quantile(dist, prob);
    if (!std::isfinite(v) || v > 1e308)
      throw NumericalError("chi_square_quantile: diverged");
    return v;
  } catch (const NumericalError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(std::string("chi_square_quantile: ") + e.what());
  }
}

double tolerance_region_factor(std::size_t n, std::size_t q, double beta,
                               double confidence, std::size_t n_mc,
                               std::uint64_t seed, std::size_t n_inner) {
  if (n <= q) throw InvalidInputError("tolerance_region_factor: need n > q");
  if (!(beta > 0.0 && beta < 1.0) || !(confidence > 0.0 && confidence < 1.0))
    throw InvalidInputError("tolerance_region_factor: bad probabilities");
  if (n_mc < 100 || n_inner < 100)
    throw InvalidInputError("tolerance_region_factor: sample sizes too small");

  const double nu = double(n - 1);
  const auto qi = static_cast<Eigen::Index>(q);
  std::vector<double> rstar(n_mc);

  parallel_for(n_mc, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> u(n_inner * q), z(n_inner * q), d(n_inner);
    Matrix L(qi, qi);
    for (std::size_t t = lo; t < hi; ++t) {
      Rng rng(Rng::derive(seed, t));
      // sampling-distribution draws: mean ~ N(0, I/n), S ~ Wishart(n-1, I)/(n-1)
      Vector ybar(qi);
      for (Eigen::Index j = 0; j < qi; ++j)
        ybar(j) = rng.normal() / std::sqrt(double(n));
      L.setZero();
      for (Eigen::Index i = 0; i < qi; ++i) {
        L(i, i) = std::sqrt(rng.chi_square(nu - double(i)));
        for (Eigen::Index j = 0; j < i; ++j) L(i, j) = rng.normal();
      }
      Matrix S = (L * L.transpose()) / nu;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
      Vector inv_lam = es.eigenvalues().cwiseMax(1e-300).cwiseInverse();
      Vector mproj = es.eigenvectors().transpose() * ybar;

      // inner sample of the quadratic form d = (X - ybar)' S^-1 (X - ybar)
      for (std::size_t i = 0; i < n_inner * q; ++i) u[i] = rng.uniform01();
      simd::kernels().norm_quantile_v(u.data(), z.data(), n_inner * q);
      for (std::size_t i = 0; i < n_inner; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < q; ++j) {
          double w = z[i * q + j] - mproj(static_cast<Eigen::Index>(j));
          acc += w * w * inv_lam(static_cast<Eigen::Index>(j));
        }
        d[i] = acc;
      }
      rstar[t] = detail::quantile_type7(d, beta);
    }
  });
  return detail::quantile_type7(rstar, confidence);
}

}  // namespace mvq
