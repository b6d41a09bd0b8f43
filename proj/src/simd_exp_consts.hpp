#pragma once

// Constants shared by the scalar and AVX2 exp lanes (Cephes-style rational
// approximation after base-2 range reduction). Both lanes must use these
// with the same fma structure so their per-element results match bitwise.

namespace coda::simd::detail {

inline constexpr double kLog2E = 1.4426950408889634073599;
inline constexpr double kC1 = 6.93145751953125e-1;
inline constexpr double kC2 = 1.42860682030941723212e-6;

inline constexpr double kExpP0 = 1.26177193074810590878e-4;
inline constexpr double kExpP1 = 3.02994407707441961300e-2;
inline constexpr double kExpP2 = 9.99999999999999999910e-1;

inline constexpr double kExpQ0 = 3.00198505138664455042e-6;
inline constexpr double kExpQ1 = 2.52448340349684104192e-3;
inline constexpr double kExpQ2 = 2.27265548208155028766e-1;
inline constexpr double kExpQ3 = 2.00000000000000000005e0;

// Flush-to-zero below this input; keeps the 2^n scaling inside the normal
// exponent range for both lanes.
inline constexpr double kExpLowCutoff = -708.0;
inline constexpr double kExpHighCutoff = 709.0;

}  // namespace coda::simd::detail
