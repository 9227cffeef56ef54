#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mvq::simd {

/// Batch math kernels. Every entry has a scalar reference implementation and,
/// on x86-64 with AVX2, a vectorized variant selected at runtime. The two are
/// equivalence-tested; the vector variants may differ from the scalar
/// reference by O(1e-12) absolute, which is far below every statistical
/// tolerance in this library.
struct Kernels {
  const char* name;

  /// out[i] = exp(x[i]), IEEE under/overflow clamped.
  void (*exp_v)(const double* x, double* out, std::size_t n);

  /// out[i] = standard normal CDF of x[i].
  void (*norm_cdf_v)(const double* x, double* out, std::size_t n);

  /// out[i] = standard normal quantile of p[i], p in (0,1).
  /// Accuracy |Phi(out)-p| <= ~1e-14; intended for Monte Carlo batch work.
  void (*norm_quantile_v)(const double* p, double* out, std::size_t n);

  /// out[i] = P(X <= h[i], Y <= k[i]) under a standard bivariate normal with
  /// correlation rho (fixed per call, |rho| <= 1 - 1e-12).
  void (*bvn_cdf_v)(const double* h, const double* k, double rho, double* out,
                    std::size_t n);
};

/// Kernels for the active backend.
const Kernels& kernels();

/// Scalar reference backend (always available).
const Kernels& scalar_kernels();

/// Select a backend by name: "auto", "scalar", "avx2".
/// Returns false (and leaves the selection unchanged) if unavailable.
bool set_backend(const std::string& name);

const char* backend_name();
std::vector<std::string> available_backends();

}  // namespace mvq::simd
