#include "distreg/simplex_qp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "distreg/error.hpp"

namespace distreg {

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n < 1) {
    throw InvalidArgument("project_simplex: empty vector");
  }
  if (!v.allFinite()) {
    throw InvalidArgument("project_simplex: non-finite entry");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return v[a] > v[b] || (v[a] == v[b] && a < b);
  });
  double cumulative = 0.0;
  double tau = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += v[order[static_cast<std::size_t>(k)]];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (v[order[static_cast<std::size_t>(k)]] - candidate > 0.0) {
      tau = candidate;
    }
  }
  return (v.array() - tau).max(0.0).matrix();
}

double simplex_qp_objective(const SimplexQPProblem& p, const Eigen::VectorXd& theta) {
  return theta.dot(p.G * theta) - 2.0 * p.b.dot(theta);
}

namespace {

double largest_eigenvalue(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd w = g * v;
    const double norm = w.norm();
    if (norm == 0.0) {
      return 0.0;
    }
    lambda = v.dot(w);
    v = w / norm;
  }
  // ||G v|| >= Rayleigh quotient for unit v.
  return std::max(lambda, (g * v).norm());
}

}  // namespace

SimplexQPSolution solve(const SimplexQPProblem& p, double tol, int max_iter) {
  const Eigen::Index n = p.G.rows();
  if (n < 1 || p.G.cols() != n || p.b.size() != n) {
    throw InvalidArgument("simplex QP: G must be n x n and b of length n");
  }
  if (!p.G.allFinite() || !p.b.allFinite()) {
    throw InvalidArgument("simplex QP: non-finite input");
  }
  if ((p.G - p.G.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("simplex QP: G is not symmetric");
  }
  SimplexQPProblem prob{0.5 * (p.G + p.G.transpose()), p.b};
  if (n > 1) {
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(prob.G, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    if (min_eig < -1e-8) {
      std::ostringstream msg;
      msg << "simplex QP: G is not positive semidefinite (min eigenvalue " << min_eig << ")";
      throw InvalidArgument(msg.str());
    }
    if (min_eig < 0.0) {
      prob.G.diagonal().array() += 1e-8;
    }
  }

  SimplexQPSolution sol;
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const double lambda = largest_eigenvalue(prob.G);
  const double lipschitz = lambda > 1e-300 ? 2.0 * lambda : 1.0;
  const double step = 1.0 / lipschitz;

  auto gradient = [&](const Eigen::VectorXd& t) -> Eigen::VectorXd {
    return 2.0 * (prob.G * t) - 2.0 * prob.b;
  };
  auto finish = [&](int iterations) {
    sol.theta = theta;
    sol.objective = simplex_qp_objective(prob, theta);
    sol.kkt_residual = (theta - project_simplex(theta - gradient(theta))).norm();
    sol.iterations = iterations;
  };

  auto kkt = [&](const Eigen::VectorXd& t) {
    return (t - project_simplex(t - gradient(t))).norm();
  };

  // Accelerated projected gradient; momentum is dropped whenever a step would
  // raise the objective, so the iterates stay monotone.
  Eigen::VectorXd anchor = theta;
  double momentum = 1.0;
  double current = simplex_qp_objective(prob, theta);
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd next = project_simplex(anchor - step * gradient(anchor));
    double value = simplex_qp_objective(prob, next);
    if (value > current) {
      momentum = 1.0;
      next = project_simplex(theta - step * gradient(theta));
      value = simplex_qp_objective(prob, next);
    }
    assert(value <= current + 1e-12 * (1.0 + std::fabs(current)));
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    anchor = next + ((momentum - 1.0) / next_momentum) * (next - theta);
    momentum = next_momentum;
    theta = std::move(next);
    current = value;
    if (kkt(theta) <= tol) {
      finish(it);
      return sol;
    }
  }
  finish(max_iter);
  std::ostringstream msg;
  msg << "simplex QP did not converge in " << max_iter << " iterations (KKT residual "
      << sol.kkt_residual << ")";
  throw QpNotConverged(msg.str(), std::vector<double>(theta.data(), theta.data() + n),
                       sol.kkt_residual, max_iter);
}

}  // namespace distreg
