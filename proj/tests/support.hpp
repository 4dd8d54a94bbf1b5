#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "distreg/kernel_embedding.hpp"
#include "distreg/random.hpp"

namespace distreg::testing {

inline double std_normal(const CounterRng& rng, std::uint64_t counter) {
  const double u1 = rng.uniform_open0(2 * counter);
  const double u2 = rng.uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// n draws from N(mean, sd^2 I).
inline SampleSet gaussian(std::uint64_t seed, std::size_t n, std::vector<double> mean,
                          double sd = 1.0) {
  const CounterRng rng(seed, 11);
  const std::size_t dim = mean.size();
  std::vector<double> v(n * dim);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = mean[i % dim] + sd * std_normal(rng, i);
  }
  return SampleSet(dim, std::move(v));
}

/// n draws from sum_c w_c N(means_c, 1), one-dimensional.
inline SampleSet gaussian_mixture_1d(std::uint64_t seed, std::size_t n,
                                     const std::vector<double>& weights,
                                     const std::vector<double>& means) {
  const CounterRng pick(seed, 12);
  const CounterRng rng(seed, 13);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = pick.uniform(i);
    std::size_t c = 0;
    while (c + 1 < weights.size() && u >= weights[c]) {
      u -= weights[c];
      ++c;
    }
    v[i] = means[c] + std_normal(rng, i);
  }
  return SampleSet(1, std::move(v));
}

template <typename T>
double median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace distreg::testing
