#pragma once

// minimize  theta^T G theta - 2 b^T theta   subject to  theta >= 0, 1^T theta = 1
//
// Solved by accelerated projected gradient with a fixed 1/L step,
// L = 2 lambda_max(G), until the KKT residual
// ||theta - proj(theta - grad)|| drops to tol.

#include <vector>

#include <Eigen/Core>

namespace distreg {

struct SimplexQPProblem {
  Eigen::MatrixXd G;
  Eigen::VectorXd b;
};

struct SimplexQPSolution {
  Eigen::VectorXd theta;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// Euclidean projection onto the probability simplex (sort and threshold).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

/// theta^T G theta - 2 b^T theta.
double simplex_qp_objective(const SimplexQPProblem& p, const Eigen::VectorXd& theta);

/// Throws InvalidArgument on asymmetric or clearly indefinite G (min
/// eigenvalue below -1e-8), QpNotConverged when max_iter is exhausted.
SimplexQPSolution solve(const SimplexQPProblem& p, double tol = 1e-10, int max_iter = 100000);

}  // namespace distreg
