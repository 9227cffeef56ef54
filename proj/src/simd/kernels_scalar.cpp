#include <cmath>
#include <cstddef>

#include "mvq/simd/kernels.hpp"
#include "../internal_math.hpp"

namespace mvq::simd {

namespace {

void exp_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void norm_cdf_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::norm_cdf(x[i]);
}

void norm_quantile_scalar(const double* p, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::norm_quantile(p[i]);
}

void bvn_cdf_scalar(const double* h, const double* k, double rho, double* out,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::bvnu(-h[i], -k[i], rho);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", exp_scalar, norm_cdf_scalar,
                         norm_quantile_scalar, bvn_cdf_scalar};
  return k;
}

}  // namespace mvq::simd
