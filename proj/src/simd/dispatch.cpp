#include <cstdlib>
#include <string_view>

#include "backends.hpp"
#include "distreg/error.hpp"

namespace distreg::simd {

bool backend_available(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(DISTREG_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(DISTREG_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const char* backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

const KernelOps& ops(Backend backend) {
  static const KernelOps scalar_ops{scalar::kernel_row, scalar::kernel_row_block_dots,
                                    scalar::exp_nonpositive};
  if (!backend_available(backend)) {
    throw InvalidArgument(std::string("SIMD backend not available: ") + backend_name(backend));
  }
  switch (backend) {
#if defined(DISTREG_HAVE_AVX2)
    case Backend::avx2: {
      static const KernelOps avx2_ops{avx2::kernel_row, avx2::kernel_row_block_dots,
                                      avx2::exp_nonpositive};
      return avx2_ops;
    }
#endif
#if defined(DISTREG_HAVE_NEON)
    case Backend::neon: {
      static const KernelOps neon_ops{neon::kernel_row, neon::kernel_row_block_dots,
                                      neon::exp_nonpositive};
      return neon_ops;
    }
#endif
    default:
      return scalar_ops;
  }
}

Backend active_backend() {
  static const Backend selected = [] {
    if (const char* env = std::getenv("DISTREG_SIMD")) {
      const std::string_view name(env);
      for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
        if (name == backend_name(b) && backend_available(b)) {
          return b;
        }
      }
    }
    for (Backend b : {Backend::avx2, Backend::neon}) {
      if (backend_available(b)) {
        return b;
      }
    }
    return Backend::scalar;
  }();
  return selected;
}

namespace {
double pairwise_range(const double* v, std::size_t n) noexcept {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s = s + v[i];
    }
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_range(v, half) + pairwise_range(v + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> values) noexcept {
  return pairwise_range(values.data(), values.size());
}

}  // namespace distreg::simd
