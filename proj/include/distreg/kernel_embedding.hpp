#pragma once

// Characteristic kernels, Gram matrices and empirical RKHS mean embeddings.
//
// Embeddings are kept in dual form: a kernel together with a weighted set of
// sample points. Every RKHS quantity reduces to weighted Gram sums, evaluated
// by the SIMD kernels in a fixed order so results do not depend on the
// backend or on the number of threads.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace distreg {

enum class KernelFamily { gaussian, laplace };

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);

class KernelConfig {
 public:
  /// k(x, y) = exp(-rho * ||x - y||^2) (gaussian) or exp(-rho * ||x - y||_1) (laplace).
  KernelConfig(KernelFamily family, double rho);

  KernelFamily family() const noexcept { return family_; }
  double rho() const noexcept { return rho_; }

  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;

 private:
  KernelFamily family_;
  double rho_;
};

/// N points in R^D, stored row-major plus a column-major copy for the kernels.
class SampleSet {
 public:
  SampleSet(std::size_t dim, std::vector<double> row_major);

  static SampleSet from_rows(const std::vector<std::vector<double>>& rows);
  /// One-dimensional samples.
  static SampleSet from_values(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return rows_.size() / dim_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {rows_.data() + i * dim_, dim_};
  }
  double at(std::size_t i, std::size_t d) const noexcept { return rows_[i * dim_ + d]; }
  const std::vector<double>& data() const noexcept { return rows_; }
  /// Coordinate d of sample j is columns()[d * size() + j].
  const std::vector<double>& columns() const noexcept { return cols_; }

  /// Per-coordinate mean.
  std::vector<double> mean() const;

  friend bool operator==(const SampleSet& a, const SampleSet& b) {
    return a.dim_ == b.dim_ && a.rows_ == b.rows_;
  }

 private:
  std::size_t dim_;
  std::vector<double> rows_;
  std::vector<double> cols_;
};

/// Weighted kernel expansion sum_n w_n k(x_n, .). Probability embeddings have
/// weights summing to one; operator outputs may carry arbitrary signed weights.
class Embedding {
 public:
  Embedding(KernelConfig kernel, SampleSet samples, std::vector<double> weights);

  const KernelConfig& kernel() const noexcept { return kernel_; }
  const SampleSet& samples() const noexcept { return samples_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t dim() const noexcept { return samples_.dim(); }
  std::size_t size() const noexcept { return samples_.size(); }

  /// Same points, weights multiplied by factor.
  Embedding scaled(double factor) const;

 private:
  KernelConfig kernel_;
  SampleSet samples_;
  std::vector<double> weights_;
};

double eval_kernel(const KernelConfig& k, std::span<const double> x, std::span<const double> y);

Eigen::MatrixXd gram(const KernelConfig& k, const SampleSet& x, const SampleSet& y);

/// Empirical mean embedding with uniform weights 1/N.
Embedding embed(const KernelConfig& k, const SampleSet& x);

/// RKHS inner product w_a^T G w_b.
double inner(const Embedding& a, const Embedding& b);

/// Squared RKHS distance, with round-off negatives in [-1e-10, 0) clamped to 0.
double mmd2(const Embedding& a, const Embedding& b);

/// RKHS norm sqrt(<e, e>), clamped at 0.
double rkhs_norm(const Embedding& e);

/// sum_i coeffs[i] * parts[i]. Identical sample points are merged and their
/// weights added, so cancellations happen in the weights rather than in the
/// Gram sums.
Embedding combine(std::span<const Embedding> parts, std::span<const double> coeffs);

/// a - b as a single merged embedding.
Embedding difference(const Embedding& a, const Embedding& b);

/// Bandwidth from the median pairwise distance m (at most 1000 evenly strided
/// points): rho = 1 / (2 m^2) for gaussian with Euclidean distances, rho = 1 / m
/// for laplace with l1 distances.
double median_heuristic(const SampleSet& x, KernelFamily family = KernelFamily::gaussian);

}  // namespace distreg
