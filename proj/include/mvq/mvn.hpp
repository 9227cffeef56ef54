#pragma once

#include <cstdint>
#include <optional>

#include "mvq/core_stats.hpp"
#include "mvq/rng.hpp"

namespace mvq {

/// Accuracy contract for multivariate CDF evaluation.
struct CdfAccuracy {
  double abs_tol = 1e-6;
  long max_evals = 10'000'000;
  std::uint64_t rng_seed = 20240901;  // drives the randomized QMC path (q >= 4)
};

/// Correlation matrix with validity invariants (unit diagonal, symmetry,
/// positive semi-definiteness, off-diagonals in [-1, 1]).
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Matrix values);
  static CorrelationMatrix identity(std::size_t q);
  static CorrelationMatrix from_cov(const Matrix& cov);
  /// Bivariate shorthand.
  static CorrelationMatrix bivariate(double rho);

  const Matrix& values() const noexcept { return values_; }
  std::size_t q() const noexcept { return static_cast<std::size_t>(values_.rows()); }

 private:
  Matrix values_;
};

/// Clamp off-diagonal entries to +-(1 - eps). Adequate for q = 2; for q >= 3
/// combine with regularize_correlation when resampled matrices lose positive
/// definiteness.
Matrix clamp_correlation(Matrix corr, double eps = 1e-9);

/// Floor eigenvalues at floor_scale * max eigenvalue and rescale back to unit
/// diagonal. Returns true when the matrix was modified. Callers opt in; the
/// validating constructors never regularize silently.
bool regularize_correlation(Matrix& corr, double floor_scale = 1e-10);

// -- univariate pieces ------------------------------------------------------

double normal_cdf(double x);
double normal_pdf(double x);
/// Inverse standard normal CDF; |Phi(result) - tau| <= 1e-12 over (0,1).
double normal_quantile(double tau);

// -- multivariate operations ------------------------------------------------

double mvn_pdf(const Vector& x, const MvnModel& model);

/// P(X <= x componentwise). Deterministic closed paths for q <= 3 and for
/// diagonal covariance; randomized QMC with Cholesky reordering for q >= 4
/// (abs_tol is then a probabilistic guarantee). Throws AccuracyError carrying
/// the best estimate when max_evals is exhausted.
double mvn_cdf(const Vector& x, const MvnModel& model, const CdfAccuracy& acc = {});

/// CDF of a zero-mean unit-variance model given by a correlation matrix.
double mvn_cdf_corr(const Vector& x, const Matrix& corr, const CdfAccuracy& acc = {});

struct SampleInfo {
  bool jitter_applied = false;
};

/// n rows from the model. Bit-identical for fixed seed. Borderline PSD
/// matrices get one shot of diagonal jitter (1e-12 * trace/q), reported via
/// info.
DataMatrix mvn_sample(const MvnModel& model, std::size_t n, std::uint64_t seed,
                      SampleInfo* info = nullptr);

/// Random correlation matrix by the C-vine construction: partial correlations
/// at tree level k drawn from a symmetric Beta(a, a) on (-1, 1) with
/// a = c + (q - 1 - k)/2.
CorrelationMatrix cvine_random_correlation(std::size_t q, double c, std::uint64_t seed);

}  // namespace mvq
