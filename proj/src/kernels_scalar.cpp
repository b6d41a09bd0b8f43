#include <cmath>
#include <limits>

#include "coda/simd/kernels.hpp"
#include "simd_exp_consts.hpp"

namespace coda::simd {

double kernel_exp(double x) {
  using namespace detail;
  if (x < kExpLowCutoff) return 0.0;
  if (x > kExpHighCutoff) return std::numeric_limits<double>::infinity();
  const double n = std::nearbyint(x * kLog2E);
  double r = std::fma(n, -kC1, x);
  r = std::fma(n, -kC2, r);
  const double rr = r * r;
  double p = std::fma(kExpP0, rr, kExpP1);
  p = std::fma(p, rr, kExpP2);
  p *= r;
  double q = std::fma(kExpQ0, rr, kExpQ1);
  q = std::fma(q, rr, kExpQ2);
  q = std::fma(q, rr, kExpQ3);
  const double e = 1.0 + 2.0 * (p / (q - p));
  // 2^n by exponent-bit construction; n is within [-1021, 1023] here.
  const long long ni = static_cast<long long>(n);
  double scale;
  const unsigned long long bits = static_cast<unsigned long long>(ni + 1023) << 52;
  __builtin_memcpy(&scale, &bits, sizeof scale);
  return e * scale;
}

namespace {

double s_dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void s_axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double s_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double s_sq_dist(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double s_max(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double s_exp_sum_shifted(const double* x, double shift, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += kernel_exp(x[i] - shift);
  return acc;
}

void s_mm_nn(double* c, const double* a, const double* b, std::size_t r,
             std::size_t k, std::size_t cols) {
  for (std::size_t i = 0; i < r; ++i) {
    double* ci = c + i * cols;
    for (std::size_t l = 0; l < k; ++l) {
      const double ail = a[i * k + l];
      const double* bl = b + l * cols;
      for (std::size_t j = 0; j < cols; ++j) ci[j] += ail * bl[j];
    }
  }
}

void s_mm_nt(double* c, const double* a, const double* b, std::size_t r,
             std::size_t k, std::size_t cols) {
  for (std::size_t i = 0; i < r; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * cols;
    for (std::size_t j = 0; j < cols; ++j) ci[j] += s_dot(ai, b + j * k, k);
  }
}

void s_mm_tn(double* c, const double* a, const double* b, std::size_t r,
             std::size_t k, std::size_t cols) {
  for (std::size_t l = 0; l < k; ++l) {
    const double* bl = b + l * cols;
    for (std::size_t i = 0; i < r; ++i) {
      const double ali = a[l * r + i];
      double* ci = c + i * cols;
      for (std::size_t j = 0; j < cols; ++j) ci[j] += ali * bl[j];
    }
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k = {
      "scalar",  s_dot,   s_axpy,  s_sum,   s_sq_dist,
      s_max,     s_exp_sum_shifted, s_mm_nn, s_mm_nt, s_mm_tn,
  };
  return k;
}

}  // namespace coda::simd
