#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "distreg/parallel.hpp"
#include "distreg/random.hpp"
#include "distreg/simd/kernels.hpp"

using namespace distreg;
using namespace distreg::simd;

namespace {

std::vector<Backend> vector_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (backend_available(b)) {
      out.push_back(b);
    }
  }
  return out;
}

std::vector<double> random_values(std::uint64_t seed, std::size_t n, double lo, double hi) {
  const CounterRng rng(seed);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * rng.uniform(i);
  }
  return v;
}

}  // namespace

TEST(ExpNonpositive, MatchesStdExpWithinTwoUlp) {
  const auto xs = random_values(1, 20000, -745.0, 0.0);
  for (double x : xs) {
    const double ref = std::exp(x);
    const double got = exp_nonpositive(x);
    if (ref < std::numeric_limits<double>::min()) {
      EXPECT_LE(std::fabs(got - ref), 1e-300) << x;
      continue;
    }
    EXPECT_LE(std::fabs(got - ref) / ref, 4.5e-16) << x;
  }
}

TEST(ExpNonpositive, EdgeValues) {
  EXPECT_EQ(exp_nonpositive(0.0), 1.0);
  EXPECT_EQ(exp_nonpositive(-800.0), 0.0);
  EXPECT_NEAR(exp_nonpositive(-1.0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(exp_nonpositive(-1e-12), 1.0 - 1e-12, 1e-16);
}

TEST(ScalarBackend, AlwaysAvailable) {
  EXPECT_TRUE(backend_available(Backend::scalar));
  EXPECT_NO_THROW(ops(Backend::scalar));
  EXPECT_TRUE(backend_available(active_backend()));
}

TEST(SimdEquivalence, ExpBitIdentical) {
  const auto xs = random_values(2, 1027, -750.0, 0.0);
  std::vector<double> ref(xs.size());
  ops(Backend::scalar).exp_nonpositive(xs.data(), xs.size(), ref.data());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ASSERT_EQ(ref[i], exp_nonpositive(xs[i]));
  }
  for (Backend b : vector_backends()) {
    std::vector<double> got(xs.size());
    ops(b).exp_nonpositive(xs.data(), xs.size(), got.data());
    EXPECT_EQ(got, ref) << backend_name(b);
  }
}

TEST(SimdEquivalence, KernelRowBitIdentical) {
  for (Metric m : {Metric::squared_euclidean, Metric::manhattan}) {
    for (std::size_t dim : {1, 2, 5}) {
      for (std::size_t n : {1, 3, 4, 7, 255, 256, 257, 1031}) {
        const auto x = random_values(3 + dim, dim, -2.0, 2.0);
        const auto yt = random_values(5 + n, n * dim, -2.0, 2.0);
        std::vector<double> ref(n);
        ops(Backend::scalar).kernel_row(m, 0.7, x.data(), yt.data(), n, n, dim, ref.data());
        for (Backend b : vector_backends()) {
          std::vector<double> got(n);
          ops(b).kernel_row(m, 0.7, x.data(), yt.data(), n, n, dim, got.data());
          EXPECT_EQ(got, ref) << backend_name(b) << " n=" << n << " dim=" << dim;
        }
      }
    }
  }
}

TEST(SimdEquivalence, BlockDotsBitIdentical) {
  for (Metric m : {Metric::squared_euclidean, Metric::manhattan}) {
    for (std::size_t n : {1, 5, 256, 300, 777}) {
      const std::size_t dim = 3;
      const auto x = random_values(11, dim, -1.0, 1.0);
      const auto yt = random_values(12 + n, n * dim, -1.0, 1.0);
      const auto w = random_values(13 + n, n, -1.0, 1.0);
      std::vector<double> ref(block_count(n));
      ops(Backend::scalar)
          .kernel_row_block_dots(m, 0.4, x.data(), yt.data(), n, n, dim, w.data(), ref.data());
      for (Backend b : vector_backends()) {
        std::vector<double> got(block_count(n));
        ops(b).kernel_row_block_dots(m, 0.4, x.data(), yt.data(), n, n, dim, w.data(),
                                     got.data());
        EXPECT_EQ(got, ref) << backend_name(b) << " n=" << n;
      }
    }
  }
}

TEST(SimdEquivalence, BlockDotsAgreeWithKernelRow) {
  const std::size_t n = 600;
  const std::size_t dim = 2;
  const auto x = random_values(21, dim, -1.0, 1.0);
  const auto yt = random_values(22, n * dim, -1.0, 1.0);
  const auto w = random_values(23, n, 0.0, 1.0);
  std::vector<double> row(n);
  ops(Backend::scalar).kernel_row(Metric::squared_euclidean, 1.3, x.data(), yt.data(), n, n, dim,
                                  row.data());
  std::vector<double> partials(block_count(n));
  ops(Backend::scalar).kernel_row_block_dots(Metric::squared_euclidean, 1.3, x.data(), yt.data(),
                                             n, n, dim, w.data(), partials.data());
  double direct = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    direct += w[j] * row[j];
  }
  EXPECT_NEAR(pairwise_sum(partials), direct, 1e-12);
}

TEST(PairwiseSum, SmallAndLarge) {
  EXPECT_EQ(pairwise_sum({}), 0.0);
  const std::vector<double> v = {1.0, 2.0, 3.0};
  EXPECT_EQ(pairwise_sum(v), 6.0);
  std::vector<double> big(100001, 0.1);
  EXPECT_NEAR(pairwise_sum(big), 10000.1, 1e-9);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) {
    EXPECT_EQ(h, 1);
  }
  EXPECT_GE(thread_count(), 1u);
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) {
                   throw std::runtime_error("boom");
                 }
               }),
               std::runtime_error);
}
