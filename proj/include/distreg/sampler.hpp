#pragma once

// Approximate sampling from a mean embedding: project the embedding onto the
// convex hull of a basis of sampleable distributions, then draw from the
// resulting mixture.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "distreg/kernel_embedding.hpp"

namespace distreg {

class Basis {
 public:
  Basis(const KernelConfig& kernel, std::vector<SampleSet> components,
        std::vector<std::string> labels);

  std::size_t size() const noexcept { return components_.size(); }
  std::size_t dim() const noexcept { return components_.front().dim(); }
  const KernelConfig& kernel() const noexcept { return embeddings_.front().kernel(); }
  const std::vector<SampleSet>& components() const noexcept { return components_; }
  const std::vector<Embedding>& embeddings() const noexcept { return embeddings_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::vector<SampleSet> components_;
  std::vector<Embedding> embeddings_;
  std::vector<std::string> labels_;
};

struct FittedMixture {
  Basis basis;
  Eigen::VectorXd theta;
  /// RKHS distance between the target and sum_i theta_i mu_i.
  double fit_residual = 0.0;
};

FittedMixture fit_mixture_weights(const Embedding& target, const Basis& basis);

/// Mixture embedding sum_i theta_i mu_i for arbitrary simplex weights.
Embedding mixture_embedding(const Basis& basis, const Eigen::VectorXd& theta);

/// Draw t picks component i with probability theta_i, then a stored sample of
/// that component uniformly with replacement. Draw t depends only on
/// (seed, t).
SampleSet sample_mixture(const Basis& basis, const Eigen::VectorXd& theta, std::size_t n,
                         std::uint64_t seed);
SampleSet sample_mixture(const FittedMixture& mixture, std::size_t n, std::uint64_t seed);

/// f(x) = sum_m coeffs[m] k(points[m], x).
struct KernelExpansion {
  KernelConfig kernel;
  SampleSet points;
  std::vector<double> coeffs;

  double operator()(std::span<const double> x) const;
  double rkhs_norm() const;
};

/// |mean of f over a - mean of f over b|.
double expectation_gap(const KernelExpansion& f, const SampleSet& a, const SampleSet& b);

}  // namespace distreg
