#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "distreg/error.hpp"
#include "distreg/kernel_embedding.hpp"
#include "distreg/network.hpp"
#include "distreg/random.hpp"
#include "distreg/simd/kernels.hpp"
#include "distreg/simplex_qp.hpp"

namespace distreg::cli {

namespace {

struct Reporter {
  std::ostream& out;
  bool all_ok = true;

  void check(bool ok, const std::string& name, const std::string& detail = {}) {
    out << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) {
      out << "  " << detail;
    }
    out << '\n';
    all_ok = all_ok && ok;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SampleSet random_set(std::uint64_t seed, std::size_t n, std::size_t dim, double scale) {
  const CounterRng rng(seed);
  std::vector<double> v(n * dim);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = scale * (2.0 * rng.uniform(i) - 1.0);
  }
  return SampleSet(dim, std::move(v));
}

double brute_kernel(const KernelConfig& k, std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    d += k.family() == KernelFamily::gaussian ? diff * diff : std::fabs(diff);
  }
  return std::exp(-k.rho() * d);
}

void gram_suite(Reporter& r) {
  int case_id = 0;
  for (KernelFamily fam : {KernelFamily::gaussian, KernelFamily::laplace}) {
    for (std::size_t dim : {1, 3, 7}) {
      ++case_id;
      const KernelConfig k(fam, 0.3);
      const SampleSet x = random_set(10 * case_id, 37, dim, 2.0);
      const SampleSet y = random_set(10 * case_id + 1, 301, dim, 2.0);
      const Eigen::MatrixXd g = gram(k, x, y);
      double worst = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
          const double ref = brute_kernel(k, x.row(i), y.row(j));
          worst = std::max(worst, std::fabs(g(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)) - ref) /
                                      std::max(ref, 1e-300));
        }
      }
      r.check(worst <= 1e-13,
              "gram " + to_string(fam) + " dim " + std::to_string(dim) + " vs double loop",
              fmt("max rel err %.3g", worst));

      const Embedding a = embed(k, x);
      const Embedding b = embed(k, y);
      double ref = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
          ref += brute_kernel(k, x.row(i), y.row(j));
        }
      }
      ref /= static_cast<double>(x.size() * y.size());
      const double err = std::fabs(inner(a, b) - ref);
      r.check(err <= 1e-12 * std::max(1.0, ref),
              "inner " + to_string(fam) + " dim " + std::to_string(dim) + " vs double sum",
              fmt("abs err %.3g", err));

      std::vector<double> ref_row(y.size());
      simd::ops(simd::Backend::scalar)
          .kernel_row(fam == KernelFamily::gaussian ? simd::Metric::squared_euclidean
                                                    : simd::Metric::manhattan,
                      k.rho(), x.row(0).data(), y.columns().data(), y.size(), y.size(), dim,
                      ref_row.data());
      for (simd::Backend be : {simd::Backend::avx2, simd::Backend::neon}) {
        if (!simd::backend_available(be)) {
          continue;
        }
        std::vector<double> row(y.size());
        simd::ops(be).kernel_row(fam == KernelFamily::gaussian
                                     ? simd::Metric::squared_euclidean
                                     : simd::Metric::manhattan,
                                 k.rho(), x.row(0).data(), y.columns().data(), y.size(), y.size(),
                                 dim, row.data());
        r.check(row == ref_row,
                std::string("kernel row ") + simd::backend_name(be) + " == scalar, " +
                    to_string(fam) + " dim " + std::to_string(dim));
      }
    }
  }
}

double grid_minimum(const SimplexQPProblem& p) {
  const int steps = 100;
  double best = std::numeric_limits<double>::infinity();
  const auto n = p.G.rows();
  Eigen::VectorXd t(n);
  for (int i = 0; i <= steps; ++i) {
    if (n == 2) {
      t << i / 100.0, (steps - i) / 100.0;
      best = std::min(best, simplex_qp_objective(p, t));
      continue;
    }
    for (int j = 0; i + j <= steps; ++j) {
      t << i / 100.0, j / 100.0, (steps - i - j) / 100.0;
      best = std::min(best, simplex_qp_objective(p, t));
    }
  }
  return best;
}

SimplexQPProblem random_psd(std::uint64_t seed, Eigen::Index n) {
  const CounterRng rng(seed, 5);
  std::uint64_t c = 0;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = 2.0 * rng.uniform(c++) - 1.0;
    }
  }
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b[i] = 2.0 * rng.uniform(c++) - 1.0;
  }
  return {a * a.transpose(), b};
}

void qp_suite(Reporter& r) {
  int failures = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  double worst_kkt = 0.0;
  for (int n : {2, 3}) {
    const int count = n == 2 ? 100 : 20;
    for (int s = 0; s < count; ++s) {
      const SimplexQPProblem p = random_psd(1000 * n + s, n);
      const SimplexQPSolution sol = solve(p);
      const double gap = sol.objective - grid_minimum(p);
      worst_gap = std::max(worst_gap, gap);
      worst_kkt = std::max(worst_kkt, sol.kkt_residual);
      const bool ok = gap <= 1e-6 && sol.kkt_residual <= 1e-8 &&
                      (sol.theta.array() >= 0.0).all() &&
                      std::fabs(sol.theta.sum() - 1.0) <= 1e-12;
      failures += ok ? 0 : 1;
      if (!ok) {
        r.check(false, "qp n=" + std::to_string(n) + " case " + std::to_string(s),
                fmt("gap %.3g", gap) + fmt(" kkt %.3g", sol.kkt_residual));
      }
    }
    r.check(failures == 0,
            "qp n=" + std::to_string(n) + " " + std::to_string(count) + " instances vs grid 0.01",
            fmt("worst gap %.3g", worst_gap) + fmt(" worst kkt %.3g", worst_kkt));
  }
  const Eigen::VectorXd proj = project_simplex((Eigen::VectorXd(3) << 0.5, 0.5, 0.5).finished());
  r.check((proj - Eigen::VectorXd::Constant(3, 1.0 / 3.0)).norm() <= 1e-15,
          "projection of (0.5,0.5,0.5)");
}

void bfs_suite(Reporter& r) {
  const Graph path = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  r.check(bfs_distance(path, 0) == std::vector<int>{0, 1, 2, 3}, "bfs path 0-1-2-3 from 0");
  const Graph cycle = Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  r.check(bfs_distance(cycle, 0) == std::vector<int>{0, 1, 2, 2, 1}, "bfs 5-cycle from 0");
  const Graph grid = Graph::from_edges(
      6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}});
  r.check(bfs_distance(grid, 0) == std::vector<int>{0, 1, 2, 1, 2, 3}, "bfs 2x3 grid from 0");
  const Graph split = Graph::from_edges(4, {{0, 1}, {2, 3}});
  r.check(bfs_distance(split, 0) == std::vector<int>{0, 1, kUnreachable, kUnreachable},
          "bfs disconnected components");
  const Graph cut = disrupted_adjacency(cycle, {1});
  r.check(bfs_distance(cut, 0)[2] == 3, "bfs 5-cycle with node 1 removed, 0 -> 2");
  r.check(detour_score(cycle, cut, 0, 2) == 1.0 - 2.0 / 3.0, "detour score 0 -> 2 on cut cycle");
}

}  // namespace

bool run_oracle(const std::string& suite, std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<void(Reporter&)>>> suites = {
      {"gram", gram_suite}, {"qp", qp_suite}, {"bfs", bfs_suite}};
  if (suite != "all" && std::none_of(suites.begin(), suites.end(),
                                     [&](const auto& s) { return s.first == suite; })) {
    throw InvalidArgument("unknown oracle suite '" + suite + "' (gram, qp, bfs, all)");
  }
  Reporter r{out};
  for (const auto& [name, fn] : suites) {
    if (suite == "all" || suite == name) {
      fn(r);
    }
  }
  return r.all_ok;
}

}  // namespace distreg::cli
