#include "mvq/core_stats.hpp"

#include <cmath>
#include <string>

namespace mvq {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw InvalidInputError("DataMatrix: empty matrix");
  if (static_cast<std::size_t>(values_.cols()) > kMaxVariates)
    throw InvalidInputError("DataMatrix: q = " + std::to_string(values_.cols()) +
                            " exceeds the supported maximum of " +
                            std::to_string(kMaxVariates));
  if (!values_.allFinite())
    throw InvalidInputError("DataMatrix: non-finite entry");
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidInputError("DataMatrix: no rows");
  std::size_t q = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != q)
      throw InvalidInputError("DataMatrix: ragged row " + std::to_string(i));
    for (std::size_t j = 0; j < q; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return DataMatrix(std::move(m));
}

MvnModel::MvnModel(Vector mean, Matrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  const auto q = mean_.size();
  if (q < 1 || static_cast<std::size_t>(q) > kMaxVariates)
    throw InvalidInputError("MvnModel: unsupported dimension");
  if (cov_.rows() != q || cov_.cols() != q)
    throw InvalidInputError("MvnModel: covariance shape does not match mean");
  if (!mean_.allFinite() || !cov_.allFinite())
    throw InvalidInputError("MvnModel: non-finite entry");
  double scale = cov_.cwiseAbs().maxCoeff();
  double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-12 * scale)
    throw InvalidInputError("MvnModel: covariance not symmetric");
  for (Eigen::Index i = 0; i < q; ++i)
    if (!(cov_(i, i) > 0.0))
      throw InvalidInputError("MvnModel: covariance diagonal must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_, Eigen::EigenvaluesOnly);
  double lmax = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(lmax, 1e-300))
    throw InvalidInputError("MvnModel: covariance not positive semi-definite");
}

Vector MvnModel::sigmas() const {
  return cov_.diagonal().cwiseSqrt();
}

bool MvnModel::positive_definite() const {
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  return llt.info() == Eigen::Success;
}

Vector sample_mean(const DataMatrix& data) {
  return data.values().colwise().mean();
}

Matrix sample_cov(const DataMatrix& data) {
  if (data.n() < 2)
    throw InsufficientSamplesError("sample_cov: need at least 2 rows, got " +
                                   std::to_string(data.n()));
  Matrix centered = data.values().rowwise() - data.values().colwise().mean();
  Matrix cov = (centered.transpose() * centered) / double(data.n() - 1);
  return (cov + Matrix(cov.transpose())) / 2.0;  // exact symmetry
}

Vector sample_sd(const DataMatrix& data) {
  return Matrix(sample_cov(data)).diagonal().cwiseSqrt();
}

StandardizedData standardize(const DataMatrix& data) {
  Vector mean = sample_mean(data);
  Vector sd = sample_sd(data);
  for (Eigen::Index j = 0; j < sd.size(); ++j)
    if (!(sd(j) > 0.0))
      throw DegenerateColumnError(
          "standardize: column " + std::to_string(j) + " has zero sample standard deviation",
          static_cast<std::size_t>(j));
  StandardizedData out;
  out.centering = mean;
  out.scaling = sd;
  out.values = (data.values().rowwise() - mean.transpose()).array().rowwise() /
               sd.transpose().array();
  return out;
}

Matrix destandardize(const Matrix& points, const Vector& centering, const Vector& scaling) {
  if (points.cols() != centering.size() || points.cols() != scaling.size())
    throw InvalidInputError("destandardize: dimension mismatch");
  for (Eigen::Index j = 0; j < scaling.size(); ++j)
    if (!(scaling(j) > 0.0))
      throw InvalidInputError("destandardize: scaling must be strictly positive");
  return (points.array().rowwise() * scaling.transpose().array()).rowwise() +
         centering.transpose().array();
}

double mahalanobis_sq(const Vector& x, const Vector& mean, const Matrix& cov) {
  if (x.size() != mean.size() || cov.rows() != x.size() || cov.cols() != x.size())
    throw InvalidInputError("mahalanobis_sq: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError("mahalanobis_sq: covariance is not positive definite");
  Vector diff = x - mean;
  Vector y = llt.matrixL().solve(diff);
  return y.squaredNorm();
}

Vector mahalanobis_sq_all(const DataMatrix& data) {
  Vector mean = sample_mean(data);
  Matrix cov = sample_cov(data);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError("mahalanobis_sq_all: sample covariance is not positive definite");
  Vector out(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    Vector diff = data.row(i).transpose() - mean;
    out(static_cast<Eigen::Index>(i)) = llt.matrixL().solve(diff).squaredNorm();
  }
  return out;
}

Matrix sample_corr(const DataMatrix& data) {
  return corr_from_cov(sample_cov(data));
}

Matrix corr_from_cov(const Matrix& cov) {
  Vector inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
  Matrix corr = cov.array() * (inv_sd * inv_sd.transpose()).array();
  corr.diagonal().setOnes();
  return corr;
}

}  // namespace mvq
