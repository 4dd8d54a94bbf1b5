// Compiled with -mavx2. Called only after dispatch confirms CPU support.

#include <immintrin.h>

#include "backends.hpp"

namespace distreg::simd::avx2 {
namespace {

using namespace detail;

inline __m256d exp_np(__m256d x) {
  const __m256d lo = _mm256_set1_pd(kExpMin);
  const __m256d below = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);
  const __m256d n = _mm256_floor_pd(
      _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(kLog2e), x), _mm256_set1_pd(0.5)));
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));
  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(kP0), rr), _mm256_set1_pd(kP1));
  p = _mm256_add_pd(_mm256_mul_pd(p, rr), _mm256_set1_pd(kP2));
  p = _mm256_mul_pd(r, p);
  __m256d q = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(kQ0), rr), _mm256_set1_pd(kQ1));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(kQ2));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(kQ3));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(_mm256_set1_pd(2.0), e));
  const __m256d shifted = _mm256_add_pd(n, _mm256_set1_pd(kExponentMagic));
  const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(shifted), 52);
  const __m256d res = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(below, res);
}

inline __m256d accumulate(Metric metric, __m256d acc, __m256d diff) {
  if (metric == Metric::squared_euclidean) {
    return _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
  }
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_add_pd(acc, _mm256_andnot_pd(sign, diff));
}

// Kernel values for the four samples starting at column j.
inline __m256d kernel4(Metric metric, __m256d neg_rho, const double* x, const double* yt,
                       std::size_t stride, std::size_t j, std::size_t dim) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t d = 0; d < dim; ++d) {
    const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(x[d]), _mm256_loadu_pd(yt + d * stride + j));
    acc = accumulate(metric, acc, diff);
  }
  return exp_np(_mm256_mul_pd(neg_rho, acc));
}

// Same as kernel4 for the trailing rem < 4 samples; missing lanes are padded
// with x itself.
inline __m256d kernel_tail(Metric metric, __m256d neg_rho, const double* x, const double* yt,
                           std::size_t stride, std::size_t j, std::size_t rem,
                           std::size_t dim) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t d = 0; d < dim; ++d) {
    const double* col = yt + d * stride + j;
    const __m256d y = _mm256_setr_pd(col[0], rem > 1 ? col[1] : x[d], rem > 2 ? col[2] : x[d], x[d]);
    acc = accumulate(metric, acc, _mm256_sub_pd(_mm256_set1_pd(x[d]), y));
  }
  return exp_np(_mm256_mul_pd(neg_rho, acc));
}

}  // namespace

void kernel_row(Metric metric, double rho, const double* x, const double* yt,
                std::size_t stride, std::size_t n, std::size_t dim, double* out) {
  const __m256d neg_rho = _mm256_set1_pd(-rho);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(out + j, kernel4(metric, neg_rho, x, yt, stride, j, dim));
  }
  if (j < n) {
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, kernel_tail(metric, neg_rho, x, yt, stride, j, n - j, dim));
    for (std::size_t l = 0; j + l < n; ++l) {
      out[j + l] = tmp[l];
    }
  }
}

void kernel_row_block_dots(Metric metric, double rho, const double* x, const double* yt,
                           std::size_t stride, std::size_t n, std::size_t dim,
                           const double* w, double* partials) {
  const __m256d neg_rho = _mm256_set1_pd(-rho);
  std::size_t b = 0;
  for (std::size_t start = 0; start < n; start += kReduceBlock, ++b) {
    const std::size_t end = start + kReduceBlock < n ? start + kReduceBlock : n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = start;
    for (; j + 4 <= end; j += 4) {
      const __m256d k = kernel4(metric, neg_rho, x, yt, stride, j, dim);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + j), k));
    }
    if (j < end) {
      const std::size_t rem = end - j;
      const __m256d k = kernel_tail(metric, neg_rho, x, yt, stride, j, rem, dim);
      const __m256d wv = _mm256_setr_pd(w[j], rem > 1 ? w[j + 1] : 0.0, rem > 2 ? w[j + 2] : 0.0, 0.0);
      const __m256d mask = _mm256_castsi256_pd(_mm256_setr_epi64x(
          -1, rem > 1 ? -1 : 0, rem > 2 ? -1 : 0, 0));
      acc = _mm256_blendv_pd(acc, _mm256_add_pd(acc, _mm256_mul_pd(wv, k)), mask);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    partials[b] = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  }
}

void exp_nonpositive(const double* in, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, exp_np(_mm256_loadu_pd(in + i)));
  }
  if (i < n) {
    alignas(32) double tmp[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t l = 0; i + l < n; ++l) {
      tmp[l] = in[i + l];
    }
    _mm256_store_pd(tmp, exp_np(_mm256_load_pd(tmp)));
    for (std::size_t l = 0; i + l < n; ++l) {
      out[i + l] = tmp[l];
    }
  }
}

}  // namespace distreg::simd::avx2
