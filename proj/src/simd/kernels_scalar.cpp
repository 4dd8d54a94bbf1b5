#include <cmath>
#include <cstdint>
#include <cstring>

#include "backends.hpp"

namespace distreg::simd {

double exp_nonpositive(double x) noexcept {
  using namespace detail;
  if (x < kExpMin) {
    return 0.0;
  }
  const double n = std::floor(kLog2e * x + 0.5);
  double r = x - n * kLn2Hi;
  r = r - n * kLn2Lo;
  const double rr = r * r;
  const double p = r * ((kP0 * rr + kP1) * rr + kP2);
  const double q = ((kQ0 * rr + kQ1) * rr + kQ2) * rr + kQ3;
  double e = p / (q - p);
  e = 1.0 + 2.0 * e;
  const double shifted = n + kExponentMagic;
  std::uint64_t bits;
  std::memcpy(&bits, &shifted, sizeof bits);
  bits <<= 52;
  double scale;
  std::memcpy(&scale, &bits, sizeof scale);
  return e * scale;
}

namespace scalar {
namespace {

inline double distance(Metric metric, const double* x, const double* yt, std::size_t stride,
                       std::size_t j, std::size_t dim) {
  double acc = 0.0;
  if (metric == Metric::squared_euclidean) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = x[d] - yt[d * stride + j];
      acc = acc + diff * diff;
    }
  } else {
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = x[d] - yt[d * stride + j];
      acc = acc + std::fabs(diff);
    }
  }
  return acc;
}

}  // namespace

void kernel_row(Metric metric, double rho, const double* x, const double* yt,
                std::size_t stride, std::size_t n, std::size_t dim, double* out) {
  const double neg_rho = -rho;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = simd::exp_nonpositive(neg_rho * distance(metric, x, yt, stride, j, dim));
  }
}

void kernel_row_block_dots(Metric metric, double rho, const double* x, const double* yt,
                           std::size_t stride, std::size_t n, std::size_t dim,
                           const double* w, double* partials) {
  const double neg_rho = -rho;
  std::size_t b = 0;
  for (std::size_t start = 0; start < n; start += kReduceBlock, ++b) {
    const std::size_t end = start + kReduceBlock < n ? start + kReduceBlock : n;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = start; j < end; ++j) {
      const double k = simd::exp_nonpositive(neg_rho * distance(metric, x, yt, stride, j, dim));
      double& acc = lane[(j - start) & 3u];
      acc = acc + w[j] * k;
    }
    partials[b] = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  }
}

void exp_nonpositive(const double* in, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = simd::exp_nonpositive(in[i]);
  }
}

}  // namespace scalar
}  // namespace distreg::simd
