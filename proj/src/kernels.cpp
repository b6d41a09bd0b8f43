#include "coda/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace coda::simd {

// Defined in kernels_avx2.cpp (TU compiled with -mavx2 -mfma).
const Kernels* avx2_kernels_impl();

const Kernels* avx2_kernels() {
#if defined(__x86_64__) || defined(__i386__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return avx2_kernels_impl();
  }
#endif
  return nullptr;
}

namespace {

const Kernels& select() {
  const char* env = std::getenv("CODA_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
  const Kernels* avx2 = avx2_kernels();
  if (env && std::strcmp(env, "avx2") == 0) {
    if (!avx2) throw std::runtime_error("CODA_SIMD=avx2 but AVX2 is unavailable");
    return *avx2;
  }
  return avx2 ? *avx2 : scalar_kernels();
}

}  // namespace

const Kernels& active() {
  static const Kernels& k = select();
  return k;
}

}  // namespace coda::simd
