#include "distreg/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "distreg/error.hpp"
#include "distreg/random.hpp"
#include "distreg/simd/kernels.hpp"
#include "distreg/simplex_qp.hpp"

namespace distreg {

Basis::Basis(const KernelConfig& kernel, std::vector<SampleSet> components,
             std::vector<std::string> labels)
    : components_(std::move(components)), labels_(std::move(labels)) {
  if (components_.empty()) {
    throw InvalidArgument("basis needs at least one component");
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < components_.size(); ++i) {
      labels_.push_back(std::to_string(i));
    }
  }
  if (labels_.size() != components_.size()) {
    throw InvalidArgument("basis needs one label per component");
  }
  for (const auto& c : components_) {
    if (c.dim() != components_.front().dim()) {
      throw InvalidArgument("basis components must share one dimension");
    }
    embeddings_.push_back(embed(kernel, c));
  }
}

FittedMixture fit_mixture_weights(const Embedding& target, const Basis& basis) {
  if (!(target.kernel() == basis.kernel())) {
    throw InvalidArgument("target and basis use different kernels");
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SimplexQPProblem problem{Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  const auto& mu = basis.embeddings();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      problem.G(i, j) = inner(mu[static_cast<std::size_t>(i)], mu[static_cast<std::size_t>(j)]);
      problem.G(j, i) = problem.G(i, j);
    }
    problem.b[i] = inner(mu[static_cast<std::size_t>(i)], target);
  }
  Eigen::VectorXd theta = n == 1 ? Eigen::VectorXd::Ones(1) : solve(problem).theta;
  const double r2 = inner(target, target) + simplex_qp_objective(problem, theta);
  return FittedMixture{basis, std::move(theta), std::sqrt(std::max(0.0, r2))};
}

Embedding mixture_embedding(const Basis& basis, const Eigen::VectorXd& theta) {
  if (static_cast<std::size_t>(theta.size()) != basis.size()) {
    throw InvalidArgument("mixture weights do not match the basis size");
  }
  return combine(basis.embeddings(),
                 std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())));
}

SampleSet sample_mixture(const Basis& basis, const Eigen::VectorXd& theta, std::size_t n,
                         std::uint64_t seed) {
  if (n == 0) {
    throw InvalidArgument("sample_mixture: n must be positive");
  }
  if (static_cast<std::size_t>(theta.size()) != basis.size()) {
    throw InvalidArgument("mixture weights do not match the basis size");
  }
  std::vector<double> cdf(basis.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    acc += std::max(0.0, theta[static_cast<Eigen::Index>(i)]);
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) {
    throw InvalidArgument("mixture weights must have positive mass");
  }
  const CounterRng pick(seed, 1);
  const CounterRng draw(seed, 2);
  const std::size_t dim = basis.dim();
  std::vector<double> rows(n * dim);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = pick.uniform(t) * acc;
    // u < acc, so some cdf entry exceeds it; zero-weight components never do first.
    const auto comp =
        static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const SampleSet& c = basis.components()[comp];
    const auto row = c.row(draw.below(t, c.size()));
    std::copy(row.begin(), row.end(), rows.begin() + static_cast<std::ptrdiff_t>(t * dim));
  }
  return SampleSet(dim, std::move(rows));
}

SampleSet sample_mixture(const FittedMixture& mixture, std::size_t n, std::uint64_t seed) {
  return sample_mixture(mixture.basis, mixture.theta, n, seed);
}

double KernelExpansion::operator()(std::span<const double> x) const {
  if (coeffs.size() != points.size()) {
    throw InvalidArgument("kernel expansion needs one coefficient per point");
  }
  double acc = 0.0;
  for (std::size_t m = 0; m < points.size(); ++m) {
    acc += coeffs[m] * eval_kernel(kernel, points.row(m), x);
  }
  return acc;
}

double KernelExpansion::rkhs_norm() const {
  return distreg::rkhs_norm(Embedding(kernel, points, coeffs));
}

double expectation_gap(const KernelExpansion& f, const SampleSet& a, const SampleSet& b) {
  const Embedding fe(f.kernel, f.points, f.coeffs);
  // <f, mu_a> - <f, mu_b> evaluated through the same Gram reduction.
  return std::fabs(inner(fe, embed(f.kernel, a)) - inner(fe, embed(f.kernel, b)));
}

}  // namespace distreg
