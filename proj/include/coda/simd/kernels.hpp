#pragma once

#include <cstddef>

namespace coda::simd {

/// Dispatch table for the arithmetic inner loops shared by the density
/// estimators, the regressor ensembles and the Q-value backups. A scalar
/// reference implementation always exists; an AVX2+FMA variant is selected
/// at runtime when the CPU supports it. The two are equivalence-tested.
///
/// Matrix arguments are dense row-major. The mm_* kernels accumulate:
///   mm_nn: C(r x c) += A(r x k) * B(k x c)
///   mm_nt: C(r x c) += A(r x k) * B(c x k)^T
///   mm_tn: C(r x c) += A(k x r)^T * B(k x c)
struct Kernels {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sq_dist)(const double* a, const double* b, std::size_t n);
  double (*max)(const double* x, std::size_t n);
  /// sum_i exp(x[i] - shift); exp is evaluated with the shared polynomial
  /// path (see kernel_exp) so scalar and vector lanes agree bitwise.
  double (*exp_sum_shifted)(const double* x, double shift, std::size_t n);
  void (*mm_nn)(double* c, const double* a, const double* b, std::size_t r,
                std::size_t k, std::size_t cols);
  void (*mm_nt)(double* c, const double* a, const double* b, std::size_t r,
                std::size_t k, std::size_t cols);
  void (*mm_tn)(double* c, const double* a, const double* b, std::size_t r,
                std::size_t k, std::size_t cols);
};

/// Kernel set chosen at first use: AVX2 when the CPU has it, unless the
/// CODA_SIMD environment variable says "scalar" (or "avx2" to require it).
const Kernels& active();

const Kernels& scalar_kernels();

/// AVX2 set, or nullptr when unsupported by this CPU or this build.
const Kernels* avx2_kernels();

/// exp(x) via the Cephes-style range reduction + rational polynomial used
/// by both lanes. Accurate to a couple of ulp over the domain we use
/// (x <= ~0; underflows to 0 below -745).
double kernel_exp(double x);

}  // namespace coda::simd
