#pragma once

// Backend entry points. Kept free of standard-library templates so the
// ISA-specific translation units do not emit inline code that could be
// picked up by the rest of the program.

#include <cstddef>

#include "distreg/simd/kernels.hpp"

namespace distreg::simd {

namespace detail {
// Constants for the Cephes-style exp shared by every backend.
inline constexpr double kLog2e = 1.4426950408889634073599;
inline constexpr double kLn2Hi = 6.93145751953125E-1;
inline constexpr double kLn2Lo = 1.42860682030941723212E-6;
inline constexpr double kP0 = 1.26177193074810590878E-4;
inline constexpr double kP1 = 3.02994407707441961300E-2;
inline constexpr double kP2 = 9.99999999999999999910E-1;
inline constexpr double kQ0 = 3.00198505138664455042E-6;
inline constexpr double kQ1 = 2.52448340349684104192E-3;
inline constexpr double kQ2 = 2.27265548208155028766E-1;
inline constexpr double kQ3 = 2.00000000000000000009E0;
// Below this the result underflows; floor(kLog2e * x + 0.5) stays >= -1022.
inline constexpr double kExpMin = -708.39;
// 2^52 + 1023: adding it to an integral n puts n + 1023 in the low mantissa bits.
inline constexpr double kExponentMagic = 4503599627371519.0;
}  // namespace detail

namespace scalar {
void kernel_row(Metric metric, double rho, const double* x, const double* yt,
                std::size_t stride, std::size_t n, std::size_t dim, double* out);
void kernel_row_block_dots(Metric metric, double rho, const double* x, const double* yt,
                           std::size_t stride, std::size_t n, std::size_t dim,
                           const double* w, double* partials);
void exp_nonpositive(const double* in, std::size_t n, double* out);
}  // namespace scalar

namespace avx2 {
void kernel_row(Metric metric, double rho, const double* x, const double* yt,
                std::size_t stride, std::size_t n, std::size_t dim, double* out);
void kernel_row_block_dots(Metric metric, double rho, const double* x, const double* yt,
                           std::size_t stride, std::size_t n, std::size_t dim,
                           const double* w, double* partials);
void exp_nonpositive(const double* in, std::size_t n, double* out);
}  // namespace avx2

namespace neon {
void kernel_row(Metric metric, double rho, const double* x, const double* yt,
                std::size_t stride, std::size_t n, std::size_t dim, double* out);
void kernel_row_block_dots(Metric metric, double rho, const double* x, const double* yt,
                           std::size_t stride, std::size_t n, std::size_t dim,
                           const double* w, double* partials);
void exp_nonpositive(const double* in, std::size_t n, double* out);
}  // namespace neon

}  // namespace distreg::simd
