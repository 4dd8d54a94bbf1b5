// AArch64 backend. Four-lane accumulation is emulated with two float64x2
// registers so the reduction order matches the scalar and AVX2 backends.

#include <arm_neon.h>

#include "backends.hpp"

namespace distreg::simd::neon {
namespace {

using namespace detail;

inline float64x2_t exp_np(float64x2_t x) {
  const float64x2_t lo = vdupq_n_f64(kExpMin);
  const uint64x2_t below = vcltq_f64(x, lo);
  x = vmaxq_f64(x, lo);
  const float64x2_t n =
      vrndmq_f64(vaddq_f64(vmulq_f64(vdupq_n_f64(kLog2e), x), vdupq_n_f64(0.5)));
  float64x2_t r = vsubq_f64(x, vmulq_f64(n, vdupq_n_f64(kLn2Hi)));
  r = vsubq_f64(r, vmulq_f64(n, vdupq_n_f64(kLn2Lo)));
  const float64x2_t rr = vmulq_f64(r, r);
  float64x2_t p = vaddq_f64(vmulq_f64(vdupq_n_f64(kP0), rr), vdupq_n_f64(kP1));
  p = vaddq_f64(vmulq_f64(p, rr), vdupq_n_f64(kP2));
  p = vmulq_f64(r, p);
  float64x2_t q = vaddq_f64(vmulq_f64(vdupq_n_f64(kQ0), rr), vdupq_n_f64(kQ1));
  q = vaddq_f64(vmulq_f64(q, rr), vdupq_n_f64(kQ2));
  q = vaddq_f64(vmulq_f64(q, rr), vdupq_n_f64(kQ3));
  float64x2_t e = vdivq_f64(p, vsubq_f64(q, p));
  e = vaddq_f64(vdupq_n_f64(1.0), vmulq_f64(vdupq_n_f64(2.0), e));
  const float64x2_t shifted = vaddq_f64(n, vdupq_n_f64(kExponentMagic));
  const int64x2_t bits = vshlq_n_s64(vreinterpretq_s64_f64(shifted), 52);
  const float64x2_t res = vmulq_f64(e, vreinterpretq_f64_s64(bits));
  return vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(res), below));
}

inline float64x2_t accumulate(Metric metric, float64x2_t acc, float64x2_t diff) {
  if (metric == Metric::squared_euclidean) {
    return vaddq_f64(acc, vmulq_f64(diff, diff));
  }
  return vaddq_f64(acc, vabsq_f64(diff));
}

inline float64x2_t kernel2(Metric metric, float64x2_t neg_rho, const double* x, const double* yt,
                           std::size_t stride, std::size_t j, std::size_t dim) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    acc = accumulate(metric, acc, vsubq_f64(vdupq_n_f64(x[d]), vld1q_f64(yt + d * stride + j)));
  }
  return exp_np(vmulq_f64(neg_rho, acc));
}

inline float64x2_t kernel_one(Metric metric, float64x2_t neg_rho, const double* x,
                              const double* yt, std::size_t stride, std::size_t j,
                              std::size_t dim) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    const double pair[2] = {yt[d * stride + j], x[d]};
    acc = accumulate(metric, acc, vsubq_f64(vdupq_n_f64(x[d]), vld1q_f64(pair)));
  }
  return exp_np(vmulq_f64(neg_rho, acc));
}

}  // namespace

void kernel_row(Metric metric, double rho, const double* x, const double* yt,
                std::size_t stride, std::size_t n, std::size_t dim, double* out) {
  const float64x2_t neg_rho = vdupq_n_f64(-rho);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    vst1q_f64(out + j, kernel2(metric, neg_rho, x, yt, stride, j, dim));
  }
  if (j < n) {
    out[j] = vgetq_lane_f64(kernel_one(metric, neg_rho, x, yt, stride, j, dim), 0);
  }
}

void kernel_row_block_dots(Metric metric, double rho, const double* x, const double* yt,
                           std::size_t stride, std::size_t n, std::size_t dim,
                           const double* w, double* partials) {
  const float64x2_t neg_rho = vdupq_n_f64(-rho);
  std::size_t b = 0;
  for (std::size_t start = 0; start < n; start += kReduceBlock, ++b) {
    const std::size_t end = start + kReduceBlock < n ? start + kReduceBlock : n;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t j = start;
    for (; j + 4 <= end; j += 4) {
      acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(w + j),
                                         kernel2(metric, neg_rho, x, yt, stride, j, dim)));
      acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(w + j + 2),
                                         kernel2(metric, neg_rho, x, yt, stride, j + 2, dim)));
    }
    vst1q_f64(lane, acc01);
    vst1q_f64(lane + 2, acc23);
    for (std::size_t l = 0; j < end; ++j, ++l) {
      const double k = vgetq_lane_f64(kernel_one(metric, neg_rho, x, yt, stride, j, dim), 0);
      lane[l] = lane[l] + w[j] * k;
    }
    partials[b] = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  }
}

void exp_nonpositive(const double* in, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, exp_np(vld1q_f64(in + i)));
  }
  if (i < n) {
    const double pair[2] = {in[i], 0.0};
    out[i] = vgetq_lane_f64(exp_np(vld1q_f64(pair)), 0);
  }
}

}  // namespace distreg::simd::neon
