#include <cstdlib>
#include <cstring>

#include "harmo/simd.hpp"

namespace harmo::simd {

#if defined(HARMO_HAVE_AVX2_TU)
const Kernels* avx2_kernels_unchecked();
#endif
#if defined(HARMO_HAVE_NEON_TU)
const Kernels* neon_kernels_unchecked();
#endif

const Kernels* avx2_kernels() {
#if defined(HARMO_HAVE_AVX2_TU)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? avx2_kernels_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels* neon_kernels() {
#if defined(HARMO_HAVE_NEON_TU)
  return neon_kernels_unchecked();
#else
  return nullptr;
#endif
}

const Kernels& active() {
  static const Kernels* chosen = [] {
    const char* env = std::getenv("HARMO_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return k;
    if (const Kernels* k = neon_kernels()) return k;
    return &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace harmo::simd
