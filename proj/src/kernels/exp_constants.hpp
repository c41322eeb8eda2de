#pragma once

// Shared constants for the rational-polynomial exp used by the scalar and
// AVX2 kernels. Both variants must evaluate the same operation sequence so
// their elementwise results match bitwise:
//
//   x  = clamp(x, -708, 709)
//   n  = floor(fma(log2e, x, 0.5))
//   r  = fma(-n, ln2_hi, x); r = fma(-n, ln2_lo, r)
//   rr = r * r
//   p  = r * fma(fma(P0, rr, P1), rr, P2)
//   q  = fma(fma(fma(Q0, rr, Q1), rr, Q2), rr, Q3)
//   e  = fma(2, p / (q - p), 1) * 2^n
namespace tdlg::kern::detail {

inline constexpr double kExpLo = -708.0;
inline constexpr double kExpHi = 709.0;
inline constexpr double kLog2E = 1.4426950408889634073599;
inline constexpr double kLn2Hi = 6.93145751953125e-1;
inline constexpr double kLn2Lo = 1.42860682030941723212e-6;

inline constexpr double kExpP0 = 1.26177193074810590878e-4;
inline constexpr double kExpP1 = 3.02994407707441961300e-2;
inline constexpr double kExpP2 = 9.99999999999999999910e-1;

inline constexpr double kExpQ0 = 3.00198505138664455042e-6;
inline constexpr double kExpQ1 = 2.52448340349684104192e-3;
inline constexpr double kExpQ2 = 2.27265548208155028766e-1;
inline constexpr double kExpQ3 = 2.00000000000000000005e0;

}  // namespace tdlg::kern::detail
