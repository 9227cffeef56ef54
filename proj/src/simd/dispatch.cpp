#include <atomic>

#include "mvq/simd/kernels.hpp"

namespace mvq::simd {

#ifdef MVQ_BUILD_AVX2
const Kernels* avx2_kernels_impl();
#endif

namespace {

const Kernels* detect_avx2() {
#ifdef MVQ_BUILD_AVX2
#if defined(__GNUC__) || defined(__clang__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return avx2_kernels_impl();
#endif
#endif
  return nullptr;
}

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* default_backend() {
  if (const Kernels* k = detect_avx2()) return k;
  return &scalar_kernels();
}

}  // namespace

const Kernels& kernels() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = default_backend();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

bool set_backend(const std::string& name) {
  if (name == "auto") {
    g_active.store(default_backend(), std::memory_order_release);
    return true;
  }
  if (name == "scalar") {
    g_active.store(&scalar_kernels(), std::memory_order_release);
    return true;
  }
  if (name == "avx2") {
    if (const Kernels* k = detect_avx2()) {
      g_active.store(k, std::memory_order_release);
      return true;
    }
    return false;
  }
  return false;
}

const char* backend_name() { return kernels().name; }

std::vector<std::string> available_backends() {
  std::vector<std::string> v{"scalar"};
  if (detect_avx2()) v.push_back("avx2");
  return v;
}

}  // namespace mvq::simd
