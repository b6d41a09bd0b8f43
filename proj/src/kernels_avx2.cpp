// AVX2+FMA kernel lane. Compiled with -mavx2 -mfma in its own TU; only
// reached through the dispatch table after a runtime cpuid check.
#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cstddef>
#include <limits>

#include "coda/simd/kernels.hpp"
#include "simd_exp_consts.hpp"

namespace coda::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double v_dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

void v_axpy(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double v_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double out = hsum(acc);
  for (; i < n; ++i) out += x[i];
  return out;
}

double v_sq_dist(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    out += d * d;
  }
  return out;
}

double v_max(const double* x, std::size_t n) {
  double out = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d m = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    for (double v : lanes) out = v > out ? v : out;
  }
  for (; i < n; ++i) out = x[i] > out ? x[i] : out;
  return out;
}

// Vector exp with the shared constants; lanes outside the cutoffs are
// blended to 0 / +inf afterwards.
inline __m256d v_exp(__m256d x) {
  using namespace detail;
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2E)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fmadd_pd(n, _mm256_set1_pd(-kC1), x);
  r = _mm256_fmadd_pd(n, _mm256_set1_pd(-kC2), r);
  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(kExpP0), rr, _mm256_set1_pd(kExpP1));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(kExpP2));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(kExpQ0), rr, _mm256_set1_pd(kExpQ1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kExpQ2));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kExpQ3));
  const __m256d e = _mm256_add_pd(
      _mm256_set1_pd(1.0),
      _mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_div_pd(p, _mm256_sub_pd(q, p))));
  // 2^n via exponent bits.
  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m256i ni64 = _mm256_cvtepi32_epi64(ni);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni64, _mm256_set1_epi64x(1023)), 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  __m256d out = _mm256_mul_pd(e, scale);
  const __m256d lo_mask = _mm256_cmp_pd(x, _mm256_set1_pd(kExpLowCutoff), _CMP_LT_OQ);
  const __m256d hi_mask = _mm256_cmp_pd(x, _mm256_set1_pd(kExpHighCutoff), _CMP_GT_OQ);
  out = _mm256_andnot_pd(lo_mask, out);
  out = _mm256_blendv_pd(out, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                         hi_mask);
  return out;
}

double v_exp_sum_shifted(const double* x, double shift, std::size_t n) {
  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, v_exp(_mm256_sub_pd(_mm256_loadu_pd(x + i), vshift)));
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += kernel_exp(x[i] - shift);
  return out;
}

void v_mm_nn(double* c, const double* a, const double* b, std::size_t r,
             std::size_t k, std::size_t cols) {
  for (std::size_t i = 0; i < r; ++i) {
    double* ci = c + i * cols;
    for (std::size_t l = 0; l < k; ++l) {
      v_axpy(ci, a[i * k + l], b + l * cols, cols);
    }
  }
}

void v_mm_nt(double* c, const double* a, const double* b, std::size_t r,
             std::size_t k, std::size_t cols) {
  for (std::size_t i = 0; i < r; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * cols;
    for (std::size_t j = 0; j < cols; ++j) ci[j] += v_dot(ai, b + j * k, k);
  }
}

void v_mm_tn(double* c, const double* a, const double* b, std::size_t r,
             std::size_t k, std::size_t cols) {
  for (std::size_t l = 0; l < k; ++l) {
    const double* bl = b + l * cols;
    for (std::size_t i = 0; i < r; ++i) {
      v_axpy(c + i * cols, a[l * r + i], bl, cols);
    }
  }
}

}  // namespace

const Kernels* avx2_kernels_impl() {
  static const Kernels k = {
      "avx2",  v_dot,   v_axpy,  v_sum,   v_sq_dist,
      v_max,   v_exp_sum_shifted, v_mm_nn, v_mm_nt, v_mm_tn,
  };
  return &k;
}

}  // namespace coda::simd

#else

namespace coda::simd {
struct Kernels;
const Kernels* avx2_kernels_impl() { return nullptr; }
}  // namespace coda::simd

#endif
