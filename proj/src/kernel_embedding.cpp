#include "distreg/kernel_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "distreg/error.hpp"
#include "distreg/parallel.hpp"
#include "distreg/simd/kernels.hpp"

namespace distreg {

namespace {

simd::Metric metric_of(KernelFamily family) {
  return family == KernelFamily::gaussian ? simd::Metric::squared_euclidean
                                          : simd::Metric::manhattan;
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

void require_same_kernel(const Embedding& a, const Embedding& b) {
  if (!(a.kernel() == b.kernel())) {
    throw InvalidArgument("embeddings use different kernels");
  }
  require_same_dim(a.dim(), b.dim(), "embedding");
}

}  // namespace

std::string to_string(KernelFamily family) {
  return family == KernelFamily::gaussian ? "gaussian" : "laplace";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "gaussian") {
    return KernelFamily::gaussian;
  }
  if (name == "laplace") {
    return KernelFamily::laplace;
  }
  throw InvalidArgument("unknown kernel family '" + name + "' (expected gaussian or laplace)");
}

KernelConfig::KernelConfig(KernelFamily family, double rho) : family_(family), rho_(rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidArgument("kernel rho must be positive and finite");
  }
}

SampleSet::SampleSet(std::size_t dim, std::vector<double> row_major)
    : dim_(dim), rows_(std::move(row_major)) {
  if (dim_ == 0) {
    throw InvalidArgument("sample dimension must be positive");
  }
  if (rows_.empty() || rows_.size() % dim_ != 0) {
    throw InvalidArgument("sample set must hold a positive whole number of rows");
  }
  for (double v : rows_) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("sample set contains a non-finite value");
    }
  }
  const std::size_t n = size();
  cols_.resize(rows_.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim_; ++d) {
      cols_[d * n + i] = rows_[i * dim_ + d];
    }
  }
}

SampleSet SampleSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) {
    throw InvalidArgument("sample set must not be empty");
  }
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    require_same_dim(r.size(), dim, "sample row");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return SampleSet(dim, std::move(flat));
}

SampleSet SampleSet::from_values(std::span<const double> values) {
  return SampleSet(1, std::vector<double>(values.begin(), values.end()));
}

std::vector<double> SampleSet::mean() const {
  const std::size_t n = size();
  std::vector<double> out(dim_);
  for (std::size_t d = 0; d < dim_; ++d) {
    out[d] = simd::pairwise_sum({cols_.data() + d * n, n}) / static_cast<double>(n);
  }
  return out;
}

Embedding::Embedding(KernelConfig kernel, SampleSet samples, std::vector<double> weights)
    : kernel_(kernel), samples_(std::move(samples)), weights_(std::move(weights)) {
  if (weights_.size() != samples_.size()) {
    throw InvalidArgument("embedding needs one weight per sample");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) {
      throw InvalidArgument("embedding weight is not finite");
    }
  }
}

Embedding Embedding::scaled(double factor) const {
  std::vector<double> w = weights_;
  for (double& v : w) {
    v *= factor;
  }
  return Embedding(kernel_, samples_, std::move(w));
}

double eval_kernel(const KernelConfig& k, std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size(), "eval_kernel");
  if (x.empty()) {
    throw InvalidArgument("eval_kernel: empty vectors");
  }
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!std::isfinite(x[d]) || !std::isfinite(y[d])) {
      throw InvalidArgument("eval_kernel: non-finite input");
    }
  }
  double out = 0.0;
  // y as a single column-major sample (stride 1).
  simd::ops(simd::Backend::scalar)
      .kernel_row(metric_of(k.family()), k.rho(), x.data(), y.data(), 1, 1, x.size(), &out);
  return out;
}

Eigen::MatrixXd gram(const KernelConfig& k, const SampleSet& x, const SampleSet& y) {
  require_same_dim(x.dim(), y.dim(), "gram");
  const auto& kernels = simd::ops(simd::active_backend());
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> g(nx, ny);
  parallel_for(nx, [&](std::size_t i) {
    kernels.kernel_row(metric_of(k.family()), k.rho(), x.row(i).data(), y.columns().data(), ny,
                       ny, x.dim(), g.row(i).data());
  });
  return g;
}

Embedding embed(const KernelConfig& k, const SampleSet& x) {
  const std::size_t n = x.size();
  return Embedding(k, x, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double inner(const Embedding& a, const Embedding& b) {
  require_same_kernel(a, b);
  const auto& kernels = simd::ops(simd::active_backend());
  const SampleSet& xa = a.samples();
  const SampleSet& xb = b.samples();
  const std::size_t na = xa.size();
  const std::size_t nb = xb.size();
  const simd::Metric metric = metric_of(a.kernel().family());
  std::vector<double> weighted_rows(na);
  parallel_for(na, [&](std::size_t i) {
    std::vector<double> partials(simd::block_count(nb));
    kernels.kernel_row_block_dots(metric, a.kernel().rho(), xa.row(i).data(),
                                  xb.columns().data(), nb, nb, xa.dim(), b.weights().data(),
                                  partials.data());
    weighted_rows[i] = a.weights()[i] * simd::pairwise_sum(partials);
  });
  return simd::pairwise_sum(weighted_rows);
}

double mmd2(const Embedding& a, const Embedding& b) {
  const double v = inner(a, a) - 2.0 * inner(a, b) + inner(b, b);
  return v < 0.0 && v >= -1e-10 ? 0.0 : v;
}

double rkhs_norm(const Embedding& e) {
  return std::sqrt(std::max(0.0, inner(e, e)));
}

Embedding combine(std::span<const Embedding> parts, std::span<const double> coeffs) {
  if (parts.empty() || parts.size() != coeffs.size()) {
    throw InvalidArgument("combine: need one coefficient per embedding");
  }
  const KernelConfig& kernel = parts.front().kernel();
  const std::size_t dim = parts.front().dim();
  std::vector<const double*> points;
  std::vector<double> weights;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    require_same_kernel(parts.front(), parts[p]);
    const auto& s = parts[p].samples();
    for (std::size_t i = 0; i < s.size(); ++i) {
      points.push_back(s.row(i).data());
      weights.push_back(coeffs[p] * parts[p].weights()[i]);
    }
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t l, std::size_t r) {
    return std::lexicographical_compare(points[l], points[l] + dim, points[r], points[r] + dim);
  };
  std::stable_sort(order.begin(), order.end(), less);

  std::vector<double> rows;
  std::vector<double> merged;
  for (std::size_t idx = 0; idx < order.size();) {
    const double* pt = points[order[idx]];
    double w = 0.0;
    std::size_t next = idx;
    while (next < order.size() && std::equal(pt, pt + dim, points[order[next]])) {
      w += weights[order[next]];
      ++next;
    }
    if (w != 0.0) {
      rows.insert(rows.end(), pt, pt + dim);
      merged.push_back(w);
    }
    idx = next;
  }
  if (merged.empty()) {
    // Zero element: keep one atom with zero weight.
    rows.assign(points.front(), points.front() + dim);
    merged.push_back(0.0);
  }
  return Embedding(kernel, SampleSet(dim, std::move(rows)), std::move(merged));
}

Embedding difference(const Embedding& a, const Embedding& b) {
  const Embedding parts[] = {a, b};
  const double coeffs[] = {1.0, -1.0};
  return combine(parts, coeffs);
}

double median_heuristic(const SampleSet& x, KernelFamily family) {
  const std::size_t n = x.size();
  if (n < 2) {
    throw InvalidArgument("median heuristic needs at least two samples");
  }
  constexpr std::size_t kMaxPoints = 1000;
  std::vector<std::size_t> idx;
  if (n <= kMaxPoints) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  } else {
    for (std::size_t i = 0; i < kMaxPoints; ++i) {
      idx.push_back(i * n / kMaxPoints);
    }
  }
  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const auto ra = x.row(idx[a]);
      const auto rb = x.row(idx[b]);
      double acc = 0.0;
      for (std::size_t d = 0; d < x.dim(); ++d) {
        const double diff = ra[d] - rb[d];
        acc += family == KernelFamily::gaussian ? diff * diff : std::fabs(diff);
      }
      dists.push_back(family == KernelFamily::gaussian ? std::sqrt(acc) : acc);
    }
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  double m = dists[mid];
  if (dists.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(dists.begin(), dists.begin() + mid));
  }
  if (!(m > 0.0)) {
    throw InvalidArgument(
        "median pairwise distance is zero (degenerate samples); set the kernel rho explicitly");
  }
  return family == KernelFamily::gaussian ? 1.0 / (2.0 * m * m) : 1.0 / m;
}

}  // namespace distreg
