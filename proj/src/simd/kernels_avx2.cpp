// AVX2 backend. Compiled with -mavx2 -mfma; selected at runtime only when the
// CPU reports AVX2 support. Each kernel mirrors the scalar reference in
// src/simd/kernels_scalar.cpp and is equivalence-tested against it.

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "mvq/simd/kernels.hpp"
#include "../internal_math.hpp"

namespace mvq::simd {
namespace {

using detail::gauss_legendre;

static constexpr double kSqrt2Fold = 1.4142135623730951;

inline __m256d vset(double v) { return _mm256_set1_pd(v); }

// exp: round-to-nearest power-of-two reduction, degree-13 Taylor on the
// residual. Residual |r| <= ln2/2, tail term r^13/13! < 2e-16.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = vset(0x1.71547652b82fep+0);
  const __m256d ln2_hi = vset(0x1.62e42f8000000p-1);
  const __m256d ln2_lo = vset(0x1.be8e7bcd5e4f2p-27);
  const __m256d max_x = vset(709.0);
  const __m256d min_x = vset(-745.0);
  __m256d clamped = _mm256_min_pd(_mm256_max_pd(x, vset(-746.0)), vset(710.0));
  __m256d nf = _mm256_round_pd(_mm256_mul_pd(clamped, log2e),
                               _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(nf, ln2_hi, clamped);
  r = _mm256_fnmadd_pd(nf, ln2_lo, r);
  // Horner with 1/k!, k = 13..2
  __m256d p = vset(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, vset(0.5));
  p = _mm256_fmadd_pd(p, r, vset(1.0));
  p = _mm256_fmadd_pd(p, r, vset(1.0));
  // scale by 2^n in two halves so the exponent stays in range
  __m256d nhalf = _mm256_round_pd(_mm256_mul_pd(nf, vset(0.5)),
                                  _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
  __m256d nrem = _mm256_sub_pd(nf, nhalf);
  auto pow2 = [](__m256d e) {
    __m256i ei = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(e));
    __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ei, _mm256_set1_epi64x(1023)), 52);
    return _mm256_castsi256_pd(bits);
  };
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, pow2(nhalf)), pow2(nrem));
  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), _mm256_cmp_pd(x, min_x, _CMP_LT_OQ));
  result = _mm256_blendv_pd(result, vset(INFINITY), _mm256_cmp_pd(x, max_x, _CMP_GT_OQ));
  return result;
}

// log: mantissa/exponent split, atanh series on z = (m-1)/(m+1), |z| <= 0.1716.
inline __m256d log4(__m256d x) {
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256i bits = _mm256_castpd_si256(x);
  __m256i expo = _mm256_srli_epi64(bits, 52);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  // e as double (bias removed)
  alignas(32) std::int64_t ebuf[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(ebuf), expo);
  alignas(32) double ed[4];
  for (int i = 0; i < 4; ++i) ed[i] = static_cast<double>(ebuf[i] - 1023);
  __m256d e = _mm256_load_pd(ed);
  // fold m > sqrt(2) down
  __m256d big = _mm256_cmp_pd(m, vset(kSqrt2Fold), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, vset(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, vset(1.0)), big);
  __m256d z = _mm256_div_pd(_mm256_sub_pd(m, vset(1.0)), _mm256_add_pd(m, vset(1.0)));
  __m256d z2 = _mm256_mul_pd(z, z);
  __m256d s = vset(1.0 / 21.0);
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 19.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 17.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 15.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 13.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 11.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 9.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 7.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 5.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0 / 3.0));
  s = _mm256_fmadd_pd(s, z2, vset(1.0));
  __m256d lm = _mm256_mul_pd(_mm256_mul_pd(vset(2.0), z), s);
  __m256d out = _mm256_fmadd_pd(e, vset(0x1.be8e7bcd5e4f2p-27),
                                _mm256_fmadd_pd(e, vset(0x1.62e42f8000000p-1), lm));
  return out;
}

// Chebyshev pieces for erfc (fitted; validated against std::erfc in tests).
// C1: erf(x)/x on s = x^2 in [0, 0.25]
static constexpr double C1[] = {
    1.083882205490613,       -0.04367779108737518,    0.0008071118294130653,
    -1.1913179518918683e-05, 1.4402787338330116e-07,  -1.4677161930265471e-09,
    1.2901901769168944e-11,  -9.912071163853398e-14,  9.2148511043888e-16,
    7.993605777301127e-16};
// C2: erfc(x) * exp(x^2) on x in [0.5, 2]
static constexpr double C2[] = {
    0.4006822530639844,      -0.17395587897748596,    0.033837025407405796,
    -0.006032263577025743,   0.0010002741182155994,   -0.00015589652524314324,
    2.301444239652395e-05,   -3.2375421924607517e-06, 4.360702485772805e-07,
    -5.6456848002151006e-08, 7.048623268390841e-09,   -8.509610099904918e-10,
    9.957529245596675e-11,   -1.1316558801155452e-11, 1.25103226389367e-12,
    -1.3328227410625004e-13};
// C3: erfc(x) * exp(x^2) on x in [2, 4]
static constexpr double C3[] = {
    0.1874295690262241,      -0.05794652883669095,   0.00859524738739652,
    -0.0012284613640242137,  0.00016974366686174438, -2.273832933692115e-05,
    2.959844378698704e-06,   -3.7513575580429475e-07, 4.63728287674365e-08,
    -5.599455538130016e-09,  6.613159385184173e-10,  -7.64823977959596e-11,
    8.66966121908825e-12,    -9.531239884643025e-13};
// C4: sqrt(pi)*x*exp(x^2)*erfc(x) on u = 1/x^2, x in [4, 28]
static constexpr double C4[] = {
    0.985047638490701,       -0.014022132515973973,  0.0002841292049966082,
    -9.144574846420284e-06,  3.940766250876138e-07,  -2.0945860557120002e-08,
    1.3087453565319153e-09,  -9.316190041630535e-11, 7.390910106153116e-12,
    -6.362521620673079e-13};

template <std::size_t N>
inline __m256d clenshaw(const double (&c)[N], double a, double b, __m256d x) {
  __m256d t = _mm256_mul_pd(
      _mm256_sub_pd(_mm256_add_pd(x, x), vset(a + b)), vset(1.0 / (b - a)));
  __m256d t2 = _mm256_add_pd(t, t);
  __m256d b0 = _mm256_setzero_pd();
  __m256d b1 = _mm256_setzero_pd();
  for (std::size_t j = N; j-- > 0;) {
    __m256d nb0 = _mm256_add_pd(vset(c[j]), _mm256_fmsub_pd(t2, b0, b1));
    b1 = b0;
    b0 = nb0;
  }
  return _mm256_fnmadd_pd(t, b1, b0);
}

// erfc(z) for z >= 0 (callers handle the reflection).
inline __m256d erfc_pos4(__m256d z) {
  __m256d z2 = _mm256_mul_pd(z, z);
  __m256d emz2 = exp4(_mm256_sub_pd(_mm256_setzero_pd(), z2));
  __m256d small_v =
      _mm256_fnmadd_pd(z, clenshaw(C1, 0.0, 0.25, z2), vset(1.0));  // 1 - z*P1(z^2)
  __m256d mid1 = _mm256_mul_pd(emz2, clenshaw(C2, 0.5, 2.0, z));
  __m256d mid2 = _mm256_mul_pd(emz2, clenshaw(C3, 2.0, 4.0, z));
  __m256d zc = _mm256_min_pd(z, vset(28.0));
  __m256d u = _mm256_div_pd(vset(1.0), _mm256_mul_pd(zc, zc));
  __m256d far = _mm256_div_pd(
      _mm256_mul_pd(emz2, clenshaw(C4, 1.0 / 784.0, 1.0 / 16.0, u)),
      _mm256_mul_pd(vset(0x1.c5bf891b4ef6ap+0), zc));
  __m256d r = small_v;
  r = _mm256_blendv_pd(r, mid1, _mm256_cmp_pd(z, vset(0.5), _CMP_GT_OQ));
  r = _mm256_blendv_pd(r, mid2, _mm256_cmp_pd(z, vset(2.0), _CMP_GT_OQ));
  r = _mm256_blendv_pd(r, far, _mm256_cmp_pd(z, vset(4.0), _CMP_GT_OQ));
  r = _mm256_blendv_pd(r, _mm256_setzero_pd(),
                       _mm256_cmp_pd(z, vset(28.0), _CMP_GE_OQ));
  return r;
}

inline __m256d norm_cdf4(__m256d x) {
  __m256d z = _mm256_mul_pd(x, vset(-0x1.6a09e667f3bccp-1));  // -x/sqrt(2)
  __m256d az = _mm256_andnot_pd(vset(-0.0), z);
  __m256d e = erfc_pos4(az);
  __m256d refl = _mm256_sub_pd(vset(2.0), e);  // erfc(z) for z < 0
  __m256d ez = _mm256_blendv_pd(e, refl, _mm256_cmp_pd(z, _mm256_setzero_pd(), _CMP_LT_OQ));
  return _mm256_mul_pd(vset(0.5), ez);
}

inline __m256d norm_pdf4(__m256d x) {
  __m256d q = _mm256_mul_pd(_mm256_mul_pd(x, x), vset(-0.5));
  return _mm256_mul_pd(vset(detail::kInvSqrt2Pi), exp4(q));
}

inline __m256d norm_quantile4(__m256d p) {
  __m256d half = vset(0.5);
  __m256d flip = _mm256_cmp_pd(p, half, _CMP_GT_OQ);
  __m256d pl = _mm256_blendv_pd(p, _mm256_sub_pd(vset(1.0), p), flip);
  pl = _mm256_max_pd(pl, vset(2.2250738585072014e-308));  // log4 needs a normal
  __m256d t = _mm256_sqrt_pd(
      _mm256_mul_pd(vset(-2.0), log4(pl)));
  // Hastings 26.2.23 seed
  __m256d num = _mm256_fmadd_pd(
      _mm256_fmadd_pd(vset(0.010328), t, vset(0.802853)), t, vset(2.515517));
  __m256d den = _mm256_fmadd_pd(
      _mm256_fmadd_pd(_mm256_fmadd_pd(vset(0.001308), t, vset(0.189269)), t,
                      vset(1.432788)),
      t, vset(1.0));
  __m256d x = _mm256_sub_pd(_mm256_div_pd(num, den), t);  // negative tail value
  for (int it = 0; it < 3; ++it) {
    __m256d err = _mm256_sub_pd(norm_cdf4(x), pl);
    __m256d phi = norm_pdf4(x);
    __m256d denom = _mm256_fmadd_pd(x, err, _mm256_add_pd(phi, phi));
    x = _mm256_sub_pd(x, _mm256_div_pd(_mm256_add_pd(err, err), denom));
  }
  __m256d neg = _mm256_sub_pd(_mm256_setzero_pd(), x);
  return _mm256_blendv_pd(x, neg, flip);
}

void exp_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
  if (i < n) {
    alignas(32) double buf[4] = {0, 0, 0, 0};
    for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
    alignas(32) double res[4];
    _mm256_store_pd(res, exp4(_mm256_load_pd(buf)));
    for (std::size_t j = i; j < n; ++j) out[j] = res[j - i];
  }
}

void norm_cdf_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, norm_cdf4(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) {
    alignas(32) double buf[4] = {x[i], x[i], x[i], x[i]};
    alignas(32) double res[4];
    _mm256_store_pd(res, norm_cdf4(_mm256_load_pd(buf)));
    out[i] = res[0];
  }
}

void norm_quantile_avx2(const double* p, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, norm_quantile4(_mm256_loadu_pd(p + i)));
  for (; i < n; ++i) {
    alignas(32) double buf[4] = {p[i], p[i], p[i], p[i]};
    alignas(32) double res[4];
    _mm256_store_pd(res, norm_quantile4(_mm256_load_pd(buf)));
    out[i] = res[0];
  }
}

// Vectorized Drezner-Genz bivariate CDF; the branch on rho is uniform per
// call, so all four lanes take the same path.
struct BvnPlan {
  double rho;
  int ng;
  const double* gx;
  const double* gw;
  bool high;  // |rho| >= 0.925
};

inline BvnPlan make_plan(double rho) {
  BvnPlan pl{};
  pl.rho = rho;
  pl.high = std::abs(rho) >= 0.925;
  int ng = pl.high ? 20 : (std::abs(rho) > 0.75 ? 20 : (std::abs(rho) > 0.3 ? 12 : 6));
  const auto& g = gauss_legendre(ng);
  pl.ng = ng;
  pl.gx = g.x.data();
  pl.gw = g.w.data();
  return pl;
}

inline __m256d bvn4(__m256d hin, __m256d kin, const BvnPlan& pl) {
  // work in survival-function arguments: bvnu(-h, -k)
  __m256d h = _mm256_sub_pd(_mm256_setzero_pd(), hin);
  __m256d k = _mm256_sub_pd(_mm256_setzero_pd(), kin);
  const double r = pl.rho;
  if (!pl.high) {
    __m256d hk = _mm256_mul_pd(h, k);
    __m256d hs = _mm256_mul_pd(vset(0.5), _mm256_fmadd_pd(h, h, _mm256_mul_pd(k, k)));
    double asr = std::asin(r);
    __m256d acc = _mm256_setzero_pd();
    for (int i = 0; i < pl.ng; ++i) {
      double sn = std::sin(asr * (pl.gx[i] + 1.0) / 2.0);
      __m256d arg = _mm256_mul_pd(
          _mm256_fmsub_pd(vset(sn), hk, hs), vset(1.0 / (1.0 - sn * sn)));
      acc = _mm256_fmadd_pd(vset(pl.gw[i]), exp4(arg), acc);
    }
    __m256d base = _mm256_mul_pd(
        norm_cdf4(_mm256_sub_pd(_mm256_setzero_pd(), h)),
        norm_cdf4(_mm256_sub_pd(_mm256_setzero_pd(), k)));
    __m256d bvn = _mm256_fmadd_pd(acc, vset(asr / (2.0 * detail::kTwoPi)), base);
    return _mm256_min_pd(vset(1.0), _mm256_max_pd(_mm256_setzero_pd(), bvn));
  }
  // high-correlation transformed form
  __m256d kk = (r < 0.0) ? _mm256_sub_pd(_mm256_setzero_pd(), k) : k;
  __m256d hk = _mm256_mul_pd(h, kk);
  double as = (1.0 - r) * (1.0 + r);
  double a = std::sqrt(as);
  __m256d diff = _mm256_sub_pd(h, kk);
  __m256d bs = _mm256_mul_pd(diff, diff);
  __m256d c = _mm256_mul_pd(_mm256_sub_pd(vset(4.0), hk), vset(1.0 / 8.0));
  __m256d d = _mm256_mul_pd(_mm256_sub_pd(vset(12.0), hk), vset(1.0 / 16.0));
  __m256d asr = _mm256_mul_pd(
      vset(-0.5), _mm256_add_pd(_mm256_mul_pd(bs, vset(1.0 / as)), hk));
  __m256d bsd5 = _mm256_mul_pd(bs, _mm256_mul_pd(d, vset(0.2)));
  __m256d term1 = _mm256_mul_pd(
      _mm256_mul_pd(vset(a), exp4(asr)),
      _mm256_add_pd(
          _mm256_fnmadd_pd(
              _mm256_mul_pd(c, _mm256_sub_pd(bs, vset(as))),
              _mm256_mul_pd(_mm256_sub_pd(vset(1.0), bsd5), vset(1.0 / 3.0)),
              vset(1.0)),
          _mm256_mul_pd(_mm256_mul_pd(c, d), vset(as * as / 5.0))));
  __m256d bvn = _mm256_and_pd(term1, _mm256_cmp_pd(asr, vset(-100.0), _CMP_GT_OQ));
  __m256d b_ = _mm256_sqrt_pd(bs);
  __m256d term2 = _mm256_mul_pd(
      _mm256_mul_pd(exp4(_mm256_mul_pd(hk, vset(-0.5))), vset(detail::kSqrt2Pi)),
      _mm256_mul_pd(
          _mm256_mul_pd(norm_cdf4(_mm256_mul_pd(b_, vset(-1.0 / a))), b_),
          _mm256_fnmadd_pd(
              _mm256_mul_pd(c, bs),
              _mm256_mul_pd(_mm256_sub_pd(vset(1.0), bsd5), vset(1.0 / 3.0)),
              vset(1.0))));
  bvn = _mm256_sub_pd(
      bvn, _mm256_and_pd(term2, _mm256_cmp_pd(_mm256_sub_pd(_mm256_setzero_pd(), hk),
                                              vset(100.0), _CMP_LT_OQ)));
  double ah = a / 2.0;
  for (int i = 0; i < 20; ++i) {
    double xs = ah * (pl.gx[i] + 1.0);
    xs *= xs;
    double rs = std::sqrt(1.0 - xs);
    __m256d asr2 = _mm256_mul_pd(
        vset(-0.5), _mm256_add_pd(_mm256_mul_pd(bs, vset(1.0 / xs)), hk));
    __m256d sp = _mm256_fmadd_pd(
        _mm256_mul_pd(c, vset(xs)), _mm256_fmadd_pd(d, vset(xs), vset(1.0)),
        vset(1.0));
    __m256d ep = _mm256_mul_pd(
        exp4(_mm256_mul_pd(hk, vset(-(1.0 - rs) / (2.0 * (1.0 + rs))))),
        vset(1.0 / rs));
    __m256d contrib = _mm256_mul_pd(
        _mm256_mul_pd(vset(ah * pl.gw[i]), exp4(asr2)), _mm256_sub_pd(ep, sp));
    bvn = _mm256_add_pd(
        bvn, _mm256_and_pd(contrib, _mm256_cmp_pd(asr2, vset(-100.0), _CMP_GT_OQ)));
  }
  bvn = _mm256_mul_pd(bvn, vset(-1.0 / detail::kTwoPi));
  if (r > 0.0) {
    bvn = _mm256_add_pd(bvn, norm_cdf4(_mm256_sub_pd(
                                  _mm256_setzero_pd(), _mm256_max_pd(h, kk))));
  } else {
    bvn = _mm256_sub_pd(_mm256_setzero_pd(), bvn);
    __m256d kgth = _mm256_cmp_pd(kk, h, _CMP_GT_OQ);
    __m256d hneg = _mm256_cmp_pd(h, _mm256_setzero_pd(), _CMP_LT_OQ);
    __m256d add_lo = _mm256_sub_pd(norm_cdf4(kk), norm_cdf4(h));
    __m256d add_hi = _mm256_sub_pd(
        norm_cdf4(_mm256_sub_pd(_mm256_setzero_pd(), h)),
        norm_cdf4(_mm256_sub_pd(_mm256_setzero_pd(), kk)));
    __m256d add = _mm256_blendv_pd(add_hi, add_lo, hneg);
    bvn = _mm256_add_pd(bvn, _mm256_and_pd(add, kgth));
  }
  return _mm256_min_pd(vset(1.0), _mm256_max_pd(_mm256_setzero_pd(), bvn));
}

void bvn_cdf_avx2(const double* h, const double* k, double rho, double* out,
                  std::size_t n) {
  const double eps_r = 1e-15;
  if (rho > 1.0 - eps_r || rho < -1.0 + eps_r) {
    // degenerate limits: defer to the scalar reference
    scalar_kernels().bvn_cdf_v(h, k, rho, out, n);
    return;
  }
  BvnPlan pl = make_plan(rho);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     bvn4(_mm256_loadu_pd(h + i), _mm256_loadu_pd(k + i), pl));
  for (; i < n; ++i) {
    alignas(32) double hb[4] = {h[i], h[i], h[i], h[i]};
    alignas(32) double kb[4] = {k[i], k[i], k[i], k[i]};
    alignas(32) double res[4];
    _mm256_store_pd(res, bvn4(_mm256_load_pd(hb), _mm256_load_pd(kb), pl));
    out[i] = res[0];
  }
}

}  // namespace

const Kernels* avx2_kernels_impl() {
  static const Kernels k{"avx2", exp_avx2, norm_cdf_avx2, norm_quantile_avx2,
                         bvn_cdf_avx2};
  return &k;
}

}  // namespace mvq::simd
