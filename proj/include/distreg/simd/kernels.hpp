#pragma once

// Data-parallel kernel evaluation.
//
// Every backend computes exactly the same sequence of IEEE operations per
// lane, so scalar, AVX2 and NEON results are bit-identical. Callers pick a
// backend through ops(); active_backend() selects the widest one the CPU
// supports, unless overridden with DISTREG_SIMD=scalar|avx2|neon.

#include <cstddef>
#include <span>

namespace distreg::simd {

enum class Metric : int {
  squared_euclidean = 0,
  manhattan = 1,
};

enum class Backend : int {
  scalar = 0,
  avx2 = 1,
  neon = 2,
};

/// Columns per reduction block. Row sums are reduced block by block with a
/// fixed 4-lane accumulation; the block partials are then combined by
/// pairwise_sum.
inline constexpr std::size_t kReduceBlock = 256;

/// Samples are passed column-major: coordinate d of sample j lives at
/// yt[d * stride + j].
struct KernelOps {
  /// out[j] = exp(-rho * dist(x, y_j)) for j in [0, n).
  void (*kernel_row)(Metric metric, double rho, const double* x, const double* yt,
                     std::size_t stride, std::size_t n, std::size_t dim, double* out);
  /// partials[b] = sum over block b of w[j] * exp(-rho * dist(x, y_j)).
  void (*kernel_row_block_dots)(Metric metric, double rho, const double* x,
                                const double* yt, std::size_t stride, std::size_t n,
                                std::size_t dim, const double* w, double* partials);
  /// out[i] = exp(in[i]) for in[i] <= 0.
  void (*exp_nonpositive)(const double* in, std::size_t n, double* out);
};

bool backend_available(Backend backend) noexcept;
const KernelOps& ops(Backend backend);
Backend active_backend();
const char* backend_name(Backend backend) noexcept;

/// Scalar reference exponential used by all kernels. Valid for x <= 0;
/// returns 0 below the double underflow threshold.
double exp_nonpositive(double x) noexcept;

inline std::size_t block_count(std::size_t n) noexcept {
  return (n + kReduceBlock - 1) / kReduceBlock;
}

/// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace distreg::simd
