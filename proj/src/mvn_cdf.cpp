#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mvq/mvn.hpp"
#include "internal_math.hpp"

namespace mvq {

namespace {

constexpr double kLowCut = -37.0;   // Phi underflows to 0 well before this
constexpr double kHighCut = 8.5;    // 1 - Phi(8.5) < 1e-17
constexpr double kIntLo = -8.5;     // integration window for conditioning

/// Adaptive Gauss-Legendre: compare one 15-point panel against its two
/// halves, recurse until the difference meets the tolerance budget.
template <typename F>
double adaptive_gl(const F& f, double a, double b, double tol, int depth = 0) {
  const auto& g = detail::gauss_legendre(15);
  auto panel = [&](double lo, double hi) {
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += g.w[i] * f(mid + half * g.x[i]);
    return s * half;
  };
  double whole = panel(a, b);
  double m = 0.5 * (a + b);
  double two = panel(a, m) + panel(m, b);
  if (std::abs(two - whole) < tol || depth >= 12) return two;
  return adaptive_gl(f, a, m, tol / 2, depth + 1) +
         adaptive_gl(f, m, b, tol / 2, depth + 1);
}

struct Tvn {
  // pivot so the largest |correlation| stays inside the exact bivariate term
  int piv;
  double r_p1, r_p2, r_12;  // corr(pivot, other1), corr(pivot, other2), corr(other1, other2)
  double s1, s2, rc;
};

Tvn plan_tvn(const Matrix& corr) {
  double a01 = std::abs(corr(0, 1)), a02 = std::abs(corr(0, 2)), a12 = std::abs(corr(1, 2));
  int piv = 2;  // keep r01 exact
  if (a02 >= a01 && a02 >= a12) piv = 1;
  else if (a12 >= a01 && a12 >= a02) piv = 0;
  int o1 = (piv == 0) ? 1 : 0;
  int o2 = (piv == 2) ? 1 : 2;
  Tvn t;
  t.piv = piv;
  t.r_p1 = corr(piv, o1);
  t.r_p2 = corr(piv, o2);
  t.r_12 = corr(o1, o2);
  t.s1 = std::sqrt(std::max(1.0 - t.r_p1 * t.r_p1, 1e-14));
  t.s2 = std::sqrt(std::max(1.0 - t.r_p2 * t.r_p2, 1e-14));
  t.rc = std::clamp((t.r_12 - t.r_p1 * t.r_p2) / (t.s1 * t.s2), -1.0 + 1e-12,
                    1.0 - 1e-12);
  return t;
}

double tvn_cdf(const Vector& b, const Matrix& corr, double tol) {
  Tvn t = plan_tvn(corr);
  int o1 = (t.piv == 0) ? 1 : 0;
  int o2 = (t.piv == 2) ? 1 : 2;
  double bp = b(t.piv), b1 = b(o1), b2 = b(o2);
  if (bp <= kIntLo) return 0.0;
  double hi = std::min(bp, -kIntLo);
  auto f = [&](double x) {
    return detail::norm_pdf(x) *
           detail::bvn_cdf((b1 - t.r_p1 * x) / t.s1, (b2 - t.r_p2 * x) / t.s2, t.rc);
  };
  return std::clamp(adaptive_gl(f, kIntLo, hi, std::max(tol, 1e-12) * 0.25), 0.0, 1.0);
}

/// Genz-style separation-of-variables transform with greedy variable
/// reordering, integrated by a shift-randomized Richtmyer rule.
double qmc_cdf(Vector b, Matrix corr, const CdfAccuracy& acc) {
  const int q = static_cast<int>(b.size());
  Matrix L = Matrix::Zero(q, q);
  std::vector<double> y(q, 0.0);
  // greedy reorder: at each step pick the most restrictive remaining variable
  for (int k = 0; k < q; ++k) {
    int best = k;
    double best_e = 2.0;
    for (int i = k; i < q; ++i) {
      double num = b(i);
      double den = corr(i, i);
      for (int j = 0; j < k; ++j) {
        num -= L(i, j) * y[j];
        den -= L(i, j) * L(i, j);
      }
      den = std::sqrt(std::max(den, 1e-14));
      double e = detail::norm_cdf(num / den);
      if (e < best_e) {
        best_e = e;
        best = i;
      }
    }
    if (best != k) {
      std::swap(b(k), b(best));
      corr.row(k).swap(corr.row(best));
      corr.col(k).swap(corr.col(best));
      L.row(k).swap(L.row(best));
    }
    double d = corr(k, k);
    for (int j = 0; j < k; ++j) d -= L(k, j) * L(k, j);
    L(k, k) = std::sqrt(std::max(d, 1e-14));
    for (int i = k + 1; i < q; ++i) {
      double s = corr(i, k);
      for (int j = 0; j < k; ++j) s -= L(i, j) * L(k, j);
      L(i, k) = s / L(k, k);
    }
    double tk = b(k);
    for (int j = 0; j < k; ++j) tk -= L(k, j) * y[j];
    tk /= L(k, k);
    double ek = detail::norm_cdf(tk);
    y[k] = (ek > 1e-14) ? -detail::norm_pdf(tk) / ek : -tk;  // E[Z | Z <= tk]
  }

  const double e0 = detail::norm_cdf(b(0) / L(0, 0));
  auto integrand = [&](const double* w, double* ybuf) {
    double f = e0;
    double e_prev = e0;
    for (int k = 1; k < q; ++k) {
      double u = std::clamp(e_prev * w[k - 1], 1e-300, 1.0 - 1e-16);
      ybuf[k - 1] = detail::norm_quantile(u);
      double t = b(k);
      for (int j = 0; j < k; ++j) t -= L(k, j) * ybuf[j];
      t /= L(k, k);
      e_prev = detail::norm_cdf(t);
      f *= e_prev;
      if (f <= 0.0) return 0.0;
    }
    return f;
  };

  static const double primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                  23, 29, 31, 37, 41, 43, 47};
  std::vector<double> sq(q - 1);
  for (int j = 0; j < q - 1; ++j) sq[j] = std::sqrt(primes[j]);
  const int nshift = 12;
  Rng rng(acc.rng_seed);
  std::vector<std::vector<double>> delta(nshift, std::vector<double>(q - 1));
  for (auto& d : delta)
    for (auto& v : d) v = rng.uniform01();

  std::vector<double> sums(nshift, 0.0);
  long counts = 0;
  long total_evals = 0;
  long batch = 500;
  double value = e0, err = 1.0;
  std::vector<double> w(q - 1), ybuf(q);
  while (true) {
    for (int s = 0; s < nshift; ++s) {
      for (long i = counts + 1; i <= counts + batch; ++i) {
        for (int j = 0; j < q - 1; ++j) {
          double v = std::fmod(double(i) * sq[j] + delta[s][j], 1.0);
          w[j] = std::abs(2.0 * v - 1.0);
        }
        sums[s] += integrand(w.data(), ybuf.data());
      }
    }
    counts += batch;
    total_evals += batch * nshift;
    double mean = 0.0;
    for (int s = 0; s < nshift; ++s) mean += sums[s] / double(counts);
    mean /= nshift;
    double var = 0.0;
    for (int s = 0; s < nshift; ++s) {
      double d = sums[s] / double(counts) - mean;
      var += d * d;
    }
    var /= double(nshift) * double(nshift - 1);
    value = mean;
    err = 3.0 * std::sqrt(var);
    if (err < acc.abs_tol) break;
    if (total_evals >= acc.max_evals)
      throw AccuracyError("mvn_cdf: QMC tolerance not met within max_evals "
                          "(estimate " + std::to_string(value) + ", bound " +
                          std::to_string(err) + ")", value, err);
    batch = std::min<long>(batch * 2, (acc.max_evals - total_evals) / nshift + 1);
  }
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

double normal_cdf(double x) { return detail::norm_cdf(x); }
double normal_pdf(double x) { return detail::norm_pdf(x); }

double normal_quantile(double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw InvalidInputError("normal_quantile: tau must lie in (0,1)");
  return detail::norm_quantile(tau);
}

double mvn_cdf_corr(const Vector& x, const Matrix& corr, const CdfAccuracy& acc) {
  if (!(acc.abs_tol > 0.0) || acc.max_evals <= 0)
    throw InvalidInputError("mvn_cdf: bad accuracy parameters");
  const auto q = x.size();
  if (corr.rows() != q || corr.cols() != q)
    throw InvalidInputError("mvn_cdf: dimension mismatch");

  // quick exits and dimension reduction for extreme coordinates
  std::vector<int> keep;
  keep.reserve(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    if (x(i) <= kLowCut) return 0.0;
    if (x(i) < kHighCut) keep.push_back(static_cast<int>(i));
  }
  if (keep.empty()) return 1.0;
  Vector b(keep.size());
  Matrix C(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    b(static_cast<Eigen::Index>(a)) = x(keep[a]);
    for (std::size_t c = 0; c < keep.size(); ++c)
      C(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) =
          corr(keep[a], keep[c]);
  }
  const auto qq = b.size();
  if (qq == 1) return detail::norm_cdf(b(0));

  double max_off = 0.0;
  for (Eigen::Index i = 0; i < qq; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      max_off = std::max(max_off, std::abs(C(i, j)));
  if (max_off < 1e-14) {  // independent margins factorize exactly
    double p = 1.0;
    for (Eigen::Index i = 0; i < qq; ++i) p *= detail::norm_cdf(b(i));
    return p;
  }
  if (qq == 2) return detail::bvn_cdf(b(0), b(1), C(0, 1));
  if (qq == 3) return tvn_cdf(b, C, acc.abs_tol);
  return qmc_cdf(b, C, acc);
}

double mvn_cdf(const Vector& x, const MvnModel& model, const CdfAccuracy& acc) {
  if (x.size() != static_cast<Eigen::Index>(model.q()))
    throw InvalidInputError("mvn_cdf: dimension mismatch");
  if (!model.positive_definite())
    throw SingularMatrixError("mvn_cdf: covariance is not positive definite");
  Vector sig = model.sigmas();
  Vector b = (x - model.mean()).cwiseQuotient(sig);
  return mvn_cdf_corr(b, corr_from_cov(model.cov()), acc);
}

}  // namespace mvq
