#include "mvq/mvn.hpp"

#include <cmath>
#include <string>

#include "internal_math.hpp"

namespace mvq {

double Rng::normal() { return detail::norm_quantile(uniform01()); }

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw InvalidInputError("Rng::gamma: shape must be positive");
  if (shape < 1.0) {
    double u = uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

CorrelationMatrix::CorrelationMatrix(Matrix values) : values_(std::move(values)) {
  const auto q = values_.rows();
  if (q < 1 || values_.cols() != q || static_cast<std::size_t>(q) > kMaxVariates)
    throw InvalidInputError("CorrelationMatrix: bad shape");
  if (!values_.allFinite())
    throw InvalidInputError("CorrelationMatrix: non-finite entry");
  for (Eigen::Index i = 0; i < q; ++i) {
    if (std::abs(values_(i, i) - 1.0) > 1e-12)
      throw InvalidInputError("CorrelationMatrix: diagonal must be 1");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(values_(i, j) - values_(j, i)) > 1e-12)
        throw InvalidInputError("CorrelationMatrix: not symmetric");
      if (std::abs(values_(i, j)) > 1.0)
        throw InvalidInputError("CorrelationMatrix: off-diagonal outside [-1, 1]");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(values_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * es.eigenvalues().maxCoeff())
    throw InvalidInputError("CorrelationMatrix: not positive semi-definite");
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t q) {
  return CorrelationMatrix(Matrix::Identity(static_cast<Eigen::Index>(q),
                                            static_cast<Eigen::Index>(q)));
}

CorrelationMatrix CorrelationMatrix::from_cov(const Matrix& cov) {
  return CorrelationMatrix(corr_from_cov(cov));
}

CorrelationMatrix CorrelationMatrix::bivariate(double rho) {
  Matrix m(2, 2);
  m << 1.0, rho, rho, 1.0;
  return CorrelationMatrix(std::move(m));
}

Matrix clamp_correlation(Matrix corr, double eps) {
  const double lim = 1.0 - eps;
  for (Eigen::Index i = 0; i < corr.rows(); ++i)
    for (Eigen::Index j = 0; j < corr.cols(); ++j)
      if (i != j) corr(i, j) = std::clamp(corr(i, j), -lim, lim);
  return corr;
}

bool regularize_correlation(Matrix& corr, double floor_scale) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
  double lmax = es.eigenvalues().maxCoeff();
  double floor = floor_scale * std::max(lmax, 1.0);
  if (es.eigenvalues().minCoeff() >= floor) return false;
  Vector lam = es.eigenvalues().cwiseMax(floor);
  Matrix fixed = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  Vector inv_sd = fixed.diagonal().cwiseSqrt().cwiseInverse();
  corr = fixed.array() * (inv_sd * inv_sd.transpose()).array();
  corr = (corr + Matrix(corr.transpose())) / 2.0;
  corr.diagonal().setOnes();
  return true;
}

double mvn_pdf(const Vector& x, const MvnModel& model) {
  if (x.size() != static_cast<Eigen::Index>(model.q()))
    throw InvalidInputError("mvn_pdf: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(model.cov());
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError("mvn_pdf: covariance is not positive definite");
  Vector diff = x - model.mean();
  Vector y = llt.matrixL().solve(diff);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    logdet += 2.0 * std::log(llt.matrixL()(i, i));
  double logp = -0.5 * (y.squaredNorm() + logdet +
                        double(x.size()) * std::log(detail::kTwoPi));
  return std::exp(logp);
}

DataMatrix mvn_sample(const MvnModel& model, std::size_t n, std::uint64_t seed,
                      SampleInfo* info) {
  if (n == 0) throw InvalidInputError("mvn_sample: n must be positive");
  const auto q = static_cast<Eigen::Index>(model.q());
  Matrix factor;
  bool jitter = false;
  Eigen::LLT<Eigen::MatrixXd> llt(model.cov());
  if (llt.info() == Eigen::Success) {
    factor = llt.matrixL();
  } else {
    double tr = model.cov().trace();
    Matrix jittered = model.cov();
    jittered.diagonal().array() += 1e-12 * tr / double(q);
    Eigen::LLT<Eigen::MatrixXd> llt2(jittered);
    if (llt2.info() == Eigen::Success) {
      factor = llt2.matrixL();
      jitter = true;
    } else {
      // PSD-but-singular model (validated by MvnModel): eigenvalue factor
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.cov());
      Vector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      factor = es.eigenvectors() * lam.asDiagonal();
      jitter = true;
    }
  }
  if (info) info->jitter_applied = jitter;
  Rng rng(seed);
  Matrix out(static_cast<Eigen::Index>(n), q);
  Vector z(q);
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) z(j) = rng.normal();
    out.row(static_cast<Eigen::Index>(i)) = (model.mean() + factor * z).transpose();
  }
  return DataMatrix(std::move(out));
}

CorrelationMatrix cvine_random_correlation(std::size_t q, double c, std::uint64_t seed) {
  if (q < 2 || q > kMaxVariates)
    throw InvalidInputError("cvine_random_correlation: need 2 <= q <= 16");
  if (!(c > 0.0))
    throw InvalidInputError("cvine_random_correlation: c must be positive");
  Rng rng(seed);
  const auto qi = static_cast<Eigen::Index>(q);
  Matrix P = Matrix::Zero(qi, qi);  // partial correlations
  Matrix R = Matrix::Identity(qi, qi);
  for (Eigen::Index k = 0; k < qi - 1; ++k) {
    double a = c + (double(q) - 1.0 - double(k + 1)) / 2.0;  // tree level k+1
    for (Eigen::Index i = k + 1; i < qi; ++i) {
      double p = 2.0 * rng.beta(a, a) - 1.0;
      P(k, i) = p;
      // fold partial correlation through the earlier tree levels
      for (Eigen::Index l = k - 1; l >= 0; --l)
        p = p * std::sqrt((1.0 - P(l, i) * P(l, i)) * (1.0 - P(l, k) * P(l, k))) +
            P(l, i) * P(l, k);
      R(k, i) = p;
      R(i, k) = p;
    }
  }
  return CorrelationMatrix(std::move(R));
}

}  // namespace mvq
