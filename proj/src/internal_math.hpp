#pragma once

// Shared scalar numerics used by the kernel backends and the mvn module.
// Everything here is deterministic and allocation-free except the cached
// Gauss-Legendre tables.

#include <cmath>
#include <cstddef>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace mvq::detail {

inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kInvSqrt2 = 0.7071067811865475;
inline constexpr double kSqrt2Pi = 2.5066282746310002;
inline constexpr double kInvSqrt2Pi = 0.3989422804014327;
inline constexpr double kTwoPi = 6.283185307179586;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

/// Hastings 26.2.23 seed, |error| < 4.5e-4, for p in (0, 0.5].
inline double norm_quantile_seed_lower(double p) {
  double t = std::sqrt(-2.0 * std::log(p));
  return -(t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                   (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))));
}

/// Standard normal quantile: Hastings seed plus three Halley refinements
/// against erfc-based Phi. |Phi(result) - p| stays below ~2e-16.
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -INFINITY;
    if (p == 1.0) return INFINITY;
    return NAN;
  }
  bool flip = p > 0.5;
  double pl = flip ? 1.0 - p : p;
  double x = norm_quantile_seed_lower(pl);
  for (int it = 0; it < 3; ++it) {
    double err = norm_cdf(x) - pl;
    double phi = norm_pdf(x);
    if (phi <= 0.0) break;
    x -= 2.0 * err / (2.0 * phi + x * err);
  }
  return flip ? -x : x;
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
/// iteration on the Legendre recurrence (no transcription of tables).
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::unordered_map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

/// P(X > h, Y > k), standard bivariate normal, correlation r.
/// Gauss-Legendre quadrature after Drezner & Wesolowsky with the
/// high-correlation transformation; |error| ~ 5e-16.
inline double bvnu(double h, double k, double r) {
  const double eps_r = 1e-15;
  if (r > 1.0 - eps_r) return norm_cdf(-std::max(h, k));
  if (r < -1.0 + eps_r) return std::max(0.0, norm_cdf(-h) - norm_cdf(k));
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    int ng = std::abs(r) > 0.75 ? 20 : (std::abs(r) > 0.3 ? 12 : 6);
    const GaussRule& g = gauss_legendre(ng);
    double hk = h * k;
    double hs = 0.5 * (h * h + k * k);
    double asr = std::asin(r);
    for (int i = 0; i < ng; ++i) {
      double sn = std::sin(asr * (g.x[i] + 1.0) / 2.0);
      bvn += g.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
  }
  const GaussRule& g = gauss_legendre(20);
  double kk = (r < 0.0) ? -k : k;
  double hk = h * kk;
  double as = (1.0 - r) * (1.0 + r);
  double a = std::sqrt(as);
  double bs = (h - kk) * (h - kk);
  double c = (4.0 - hk) / 8.0;
  double d = (12.0 - hk) / 16.0;
  double asr = -(bs / as + hk) / 2.0;
  if (asr > -100.0)
    bvn = a * std::exp(asr) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
  if (-hk < 100.0) {
    double b = std::sqrt(bs);
    bvn -= std::exp(-hk / 2.0) * kSqrt2Pi * norm_cdf(-b / a) * b *
           (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
  }
  double ah = a / 2.0;
  for (int i = 0; i < 20; ++i) {
    double xs = ah * (g.x[i] + 1.0);
    xs *= xs;
    double asr2 = -(bs / xs + hk) / 2.0;
    if (asr2 > -100.0) {
      double rs = std::sqrt(1.0 - xs);
      double sp = 1.0 + c * xs * (1.0 + d * xs);
      double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
      bvn += ah * g.w[i] * std::exp(asr2) * (ep - sp);
    }
  }
  bvn = -bvn / kTwoPi;
  if (r > 0.0) {
    bvn += norm_cdf(-std::max(h, kk));
  } else {
    bvn = -bvn;
    if (kk > h) {
      if (h < 0.0)
        bvn += norm_cdf(kk) - norm_cdf(h);
      else
        bvn += norm_cdf(-h) - norm_cdf(-kk);
    }
  }
  return std::min(1.0, std::max(0.0, bvn));
}

/// P(X <= h, Y <= k), standard bivariate normal, correlation r.
inline double bvn_cdf(double h, double k, double r) { return bvnu(-h, -k, r); }

}  // namespace mvq::detail
