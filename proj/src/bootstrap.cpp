#include "mvq/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "mvq/mvn.hpp"
#include "internal_math.hpp"

namespace mvq {

void BootstrapConfig::validate() const {
  if (b < 100) throw InvalidInputError("BootstrapConfig: b must be at least 100");
}

void PercentileRequest::validate() const {
  if (gammas.empty()) throw InvalidInputError("PercentileRequest: no gammas");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0 && gammas[i] < 1.0))
      throw InvalidInputError("PercentileRequest: gamma outside (0,1)");
    if (i > 0 && gammas[i] < gammas[i - 1])
      throw InvalidInputError("PercentileRequest: gammas must ascend");
  }
}

namespace {

bool has_degenerate_column(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double mean = m.col(j).mean();
    double ss = (m.col(j).array() - mean).square().sum();
    if (!(ss > 0.0)) return true;
  }
  return false;
}

}  // namespace

DataMatrix resample(const DataMatrix& data, BootstrapStyle style, Rng& rng) {
  if (data.n() < 2) throw InsufficientSamplesError("resample: need n >= 2");
  if (style == BootstrapStyle::parametric) {
    Matrix cov = sample_cov(data);
    MvnModel model(Vector::Zero(static_cast<Eigen::Index>(data.q())), cov);
    // one draw stream per call, derived from the caller's rng
    return mvn_sample(model, data.n(), rng.next_u64());
  }
  const std::size_t n = data.n();
  for (int attempt = 0; attempt <= 100; ++attempt) {
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(data.q()));
    for (std::size_t i = 0; i < n; ++i)
      out.row(static_cast<Eigen::Index>(i)) =
          data.values().row(static_cast<Eigen::Index>(rng.uniform_index(n)));
    if (!has_degenerate_column(out)) return DataMatrix(std::move(out));
  }
  throw DegenerateResampleError(
      "resample: 100 consecutive degenerate draws (a column keeps collapsing "
      "to zero variance); use the parametric style or more data");
}

namespace detail {

double quantile_type7_sorted(const double* sorted, std::size_t n, double gamma) {
  if (n == 1) return sorted[0];
  double h = (double(n) - 1.0) * gamma;
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - double(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile_type7(std::vector<double>& vals, double gamma) {
  std::sort(vals.begin(), vals.end());
  return quantile_type7_sorted(vals.data(), vals.size(), gamma);
}

}  // namespace detail

std::vector<double> percentile_ci(std::vector<double> replicates,
                                  const PercentileRequest& request) {
  request.validate();
  if (replicates.size() < 100)
    throw InvalidInputError("percentile_ci: need at least 100 replicates");
  std::sort(replicates.begin(), replicates.end());
  std::vector<double> out;
  out.reserve(request.gammas.size());
  for (double g : request.gammas)
    out.push_back(detail::quantile_type7_sorted(replicates.data(), replicates.size(), g));
  return out;
}

double bca_adjusted_level(double z0, double a, double gamma) {
  double zg = mvq::detail::norm_quantile(gamma);
  double num = z0 + zg;
  double den = 1.0 - a * num;
  double adj;
  if (den <= 1e-12) {
    adj = num > 0.0 ? 1.0 - 1e-12 : 1e-12;  // acceleration blow-up; clamp
    return adj;
  }
  adj = mvq::detail::norm_cdf(z0 + num / den);
  return std::clamp(adj, 1e-12, 1.0 - 1e-12);
}

double jackknife_acceleration(const std::vector<double>& jackknife_values) {
  if (jackknife_values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : jackknife_values) mean += v;
  mean /= double(jackknife_values.size());
  double s2 = 0.0, s3 = 0.0;
  for (double v : jackknife_values) {
    double d = mean - v;
    s2 += d * d;
    s3 += d * d * d;
  }
  if (s2 <= 0.0) return 0.0;
  return s3 / (6.0 * std::pow(s2, 1.5));
}

CiResult bca_ci(std::vector<double> replicates, double theta_hat,
                const std::vector<double>& jackknife_values,
                const PercentileRequest& request) {
  request.validate();
  if (replicates.size() < 100)
    throw InvalidInputError("bca_ci: need at least 100 replicates");
  bool all_equal = std::all_of(replicates.begin(), replicates.end(),
                               [&](double v) { return v == replicates.front(); });
  std::size_t below = 0;
  for (double v : replicates) below += (v < theta_hat);
  if (all_equal || below == 0 || below == replicates.size()) {
    CiResult r;
    r.values = percentile_ci(std::move(replicates), request);
    r.percentile_fallback = true;
    return r;
  }
  double z0 = mvq::detail::norm_quantile(double(below) / double(replicates.size()));
  double a = jackknife_acceleration(jackknife_values);
  std::sort(replicates.begin(), replicates.end());
  CiResult r;
  r.values.reserve(request.gammas.size());
  for (double g : request.gammas) {
    double adj = bca_adjusted_level(z0, a, g);
    r.values.push_back(
        detail::quantile_type7_sorted(replicates.data(), replicates.size(), adj));
  }
  return r;
}

CiResult bootstrap_ci(std::vector<double> replicates, CiMethod method,
                      double theta_hat, const std::vector<double>& jackknife_values,
                      const PercentileRequest& request) {
  switch (method) {
    case CiMethod::percentile: {
      CiResult r;
      r.values = percentile_ci(std::move(replicates), request);
      return r;
    }
    case CiMethod::bias_corrected:
      return bca_ci(std::move(replicates), theta_hat, {}, request);
    case CiMethod::bca:
      return bca_ci(std::move(replicates), theta_hat, jackknife_values, request);
  }
  throw InvalidInputError("bootstrap_ci: unknown method");
}

std::vector<CdfGrid> tensor_percentile(const std::vector<CdfGrid>& stack,
                                       const PercentileRequest& request) {
  request.validate();
  if (stack.empty()) throw InvalidInputError("tensor_percentile: empty stack");
  const CdfGrid& first = stack.front();
  for (const auto& g : stack)
    if (g.values.size() != first.values.size() || g.axes.size() != first.axes.size())
      throw InvalidInputError("tensor_percentile: shape mismatch in stack");

  bool probabilities = true;
  for (const auto& g : stack) {
    for (double v : g.values)
      if (v < 0.0 || v > 1.0) {
        probabilities = false;
        break;
      }
    if (!probabilities) break;
  }

  std::vector<CdfGrid> out(request.gammas.size());
  for (auto& g : out) {
    g.axes = first.axes;
    g.values.assign(first.values.size(), 0.0);
  }
  const std::size_t b = stack.size();
  std::vector<double> cell(b);
  for (std::size_t idx = 0; idx < first.values.size(); ++idx) {
    for (std::size_t r = 0; r < b; ++r) cell[r] = stack[r].values[idx];
    std::sort(cell.begin(), cell.end());
    for (std::size_t gi = 0; gi < request.gammas.size(); ++gi) {
      double v = detail::quantile_type7_sorted(cell.data(), b, request.gammas[gi]);
      if (probabilities) v = std::clamp(v, 0.0, 1.0);
      out[gi].values[idx] = v;
    }
  }
  return out;
}

}  // namespace mvq
