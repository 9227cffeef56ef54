#pragma once

#include <cstdint>
#include <random>

namespace mvq {

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence is
/// fixed by the standard) and provides its own variate transforms so that
/// results are bit-identical across platforms and library versions for a
/// fixed seed. std::*_distribution is never used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Derive an independent stream seed from (seed, index), splitmix64 mixing.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on the open interval (0,1); 53-bit resolution, never returns 0 or 1.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n); multiplicative range reduction (no rejection,
  /// bias < 2^-64, deterministic).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  /// Standard normal via inverse-CDF of a (0,1) uniform. Defined in mvn_cdf.cpp.
  double normal();

  /// Gamma(shape, scale=1), Marsaglia-Tsang squeeze; shape < 1 via boost trick.
  double gamma(double shape);

  /// Beta(a, b) from two gammas.
  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  /// Chi-square with (possibly non-integer) dof.
  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mvq
