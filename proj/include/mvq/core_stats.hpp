#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "mvq/errors.hpp"

namespace mvq {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// All routines here target low dimension; grids and quantile solvers scale
/// badly past this and the CDF machinery is specified only up to q = 16.
inline constexpr std::size_t kMaxVariates = 16;

/// n x q matrix of multivariate observations, one sample per row.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);
  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

  const Matrix& values() const noexcept { return values_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t q() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  Eigen::RowVectorXd row(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)); }

 private:
  Matrix values_;
};

/// Mean vector plus covariance matrix with validity invariants
/// (symmetry, positive semi-definiteness, strictly positive diagonal).
class MvnModel {
 public:
  MvnModel(Vector mean, Matrix cov);

  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }
  std::size_t q() const noexcept { return static_cast<std::size_t>(mean_.size()); }

  /// Per-axis standard deviations (sqrt of the covariance diagonal).
  Vector sigmas() const;

  /// True when an LLT factorization succeeds.
  bool positive_definite() const;

 private:
  Vector mean_;
  Matrix cov_;
};

/// Result of the standardization transform: values with zero column means and
/// unit column variances, plus the affine pieces needed to invert it.
struct StandardizedData {
  Matrix values;
  Vector centering;  // column means of the original data
  Vector scaling;    // column sample standard deviations of the original data
};

Vector sample_mean(const DataMatrix& data);
Matrix sample_cov(const DataMatrix& data);
Vector sample_sd(const DataMatrix& data);

StandardizedData standardize(const DataMatrix& data);
Matrix destandardize(const Matrix& points, const Vector& centering, const Vector& scaling);

double mahalanobis_sq(const Vector& x, const Vector& mean, const Matrix& cov);
Vector mahalanobis_sq_all(const DataMatrix& data);

/// Pearson correlation matrix of the columns of `data`.
Matrix sample_corr(const DataMatrix& data);

/// Correlation matrix induced by a covariance matrix.
Matrix corr_from_cov(const Matrix& cov);

}  // namespace mvq
