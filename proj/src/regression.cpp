#include "distreg/regression.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "distreg/error.hpp"
#include "distreg/simplex_qp.hpp"

namespace distreg {

namespace {

constexpr double kSingularRcond = 1e-12;

// Solves (a + ridge I) x = rhs for symmetric a, rejecting numerically
// singular systems.
Eigen::MatrixXd solve_symmetric(const Eigen::MatrixXd& a, double ridge, const Eigen::MatrixXd& rhs,
                                const char* what) {
  Eigen::MatrixXd reg = a;
  reg.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reg);
  if (eig.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": eigen-decomposition failed");
  }
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double top = values.cwiseAbs().maxCoeff();
  if (!(values.minCoeff() > kSingularRcond * top)) {
    std::ostringstream msg;
    msg << what << ": Gram matrix is singular or indefinite (eigenvalues in [" << values.minCoeff()
        << ", " << values.maxCoeff() << "]); use a ridge > 0";
    throw NumericalError(msg.str());
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return v * (values.cwiseInverse().asDiagonal() * (v.transpose() * rhs));
}

Eigen::MatrixXd input_gram(const std::vector<Embedding>& a, const std::vector<Embedding>& b) {
  Eigen::MatrixXd g(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      g(i, j) = inner(a[i], b[j]);
    }
  }
  return g;
}

Eigen::MatrixXd symmetric_gram(const std::vector<Embedding>& a) {
  Eigen::MatrixXd g(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i; j < a.size(); ++j) {
      g(i, j) = inner(a[i], a[j]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

void require_single_input(const TrainingPairs& pairs, const char* what) {
  if (pairs.arity() != 1) {
    throw InvalidArgument(std::string(what) + " requires exactly one input per pair");
  }
}

std::vector<Embedding> first_inputs(const TrainingPairs& pairs) {
  std::vector<Embedding> out;
  for (std::size_t k = 0; k < pairs.count(); ++k) {
    out.push_back(pairs.inputs(k).front());
  }
  return out;
}

std::vector<Embedding> all_outputs(const TrainingPairs& pairs) {
  std::vector<Embedding> out;
  for (std::size_t k = 0; k < pairs.count(); ++k) {
    out.push_back(pairs.output(k));
  }
  return out;
}

}  // namespace

TrainingPairs::TrainingPairs(std::vector<std::vector<Embedding>> inputs,
                             std::vector<Embedding> outputs)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  if (outputs_.empty() || inputs_.size() != outputs_.size()) {
    throw InvalidArgument("training pairs: need K >= 1 input tuples and K outputs");
  }
  const std::size_t arity = inputs_.front().size();
  if (arity == 0) {
    throw InvalidArgument("training pairs: input tuples must be non-empty");
  }
  const KernelConfig& kernel = outputs_.front().kernel();
  for (std::size_t k = 0; k < outputs_.size(); ++k) {
    if (inputs_[k].size() != arity) {
      throw InvalidArgument("training pairs: all input tuples must have the same length");
    }
    if (!(outputs_[k].kernel() == kernel)) {
      throw InvalidArgument("training pairs: all embeddings must share one kernel");
    }
    for (const auto& e : inputs_[k]) {
      if (!(e.kernel() == kernel)) {
        throw InvalidArgument("training pairs: all embeddings must share one kernel");
      }
    }
  }
}

TrainingPairs TrainingPairs::single_input(std::vector<Embedding> inputs,
                                          std::vector<Embedding> outputs) {
  std::vector<std::vector<Embedding>> tuples;
  tuples.reserve(inputs.size());
  for (auto& e : inputs) {
    tuples.push_back({std::move(e)});
  }
  return TrainingPairs(std::move(tuples), std::move(outputs));
}

NormalEquations normal_equations(const TrainingPairs& pairs) {
  const std::size_t arity = pairs.arity();
  NormalEquations eq;
  eq.H = Eigen::MatrixXd::Zero(arity, arity);
  eq.g = Eigen::VectorXd::Zero(arity);
  eq.count = pairs.count();
  for (std::size_t k = 0; k < pairs.count(); ++k) {
    const auto& q = pairs.inputs(k);
    const Embedding& p = pairs.output(k);
    eq.H += symmetric_gram(q);
    for (std::size_t i = 0; i < arity; ++i) {
      eq.g[i] += inner(q[i], p);
    }
    eq.output_energy += inner(p, p);
  }
  return eq;
}

double training_objective(const NormalEquations& eq, const Eigen::VectorXd& coeffs) {
  return eq.output_energy - 2.0 * eq.g.dot(coeffs) + coeffs.dot(eq.H * coeffs);
}

double default_ridge(double trace, std::size_t count) {
  return 1e-8 * trace / static_cast<double>(count);
}

NonParametricOperator fit_nonparametric(const TrainingPairs& pairs, std::optional<double> ridge) {
  require_single_input(pairs, "non-parametric operator");
  NonParametricOperator op;
  op.train_inputs = first_inputs(pairs);
  op.train_outputs = all_outputs(pairs);
  const Eigen::MatrixXd m_qq = symmetric_gram(op.train_inputs);
  op.ridge = ridge.value_or(default_ridge(m_qq.trace(), pairs.count()));
  if (op.ridge < 0.0 || !std::isfinite(op.ridge)) {
    throw InvalidArgument("ridge must be finite and non-negative");
  }
  const auto k = static_cast<Eigen::Index>(pairs.count());
  op.coeff = solve_symmetric(m_qq, op.ridge, Eigen::MatrixXd::Identity(k, k),
                             "non-parametric operator");
  return op;
}

Embedding apply_nonparametric(const NonParametricOperator& op, const Embedding& q) {
  const auto k = static_cast<Eigen::Index>(op.train_inputs.size());
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    v[i] = inner(op.train_inputs[static_cast<std::size_t>(i)], q);
  }
  const Eigen::VectorXd c = op.coeff * v;
  return combine(op.train_outputs, std::span<const double>(c.data(), static_cast<std::size_t>(k)));
}

OneParameterModel fit_one_parameter(const TrainingPairs& pairs) {
  require_single_input(pairs, "one-parameter model");
  double trace_pq = 0.0;
  double trace_qq = 0.0;
  for (std::size_t k = 0; k < pairs.count(); ++k) {
    const Embedding& q = pairs.inputs(k).front();
    trace_pq += inner(pairs.output(k), q);
    trace_qq += inner(q, q);
  }
  if (!(trace_qq > 0.0)) {
    throw NumericalError("one-parameter model: trace of the input Gram is zero");
  }
  return {trace_pq / trace_qq};
}

MixtureEmbeddingModel fit_mixture_embeddings(const TrainingPairs& pairs,
                                             std::optional<double> ridge) {
  const NormalEquations eq = normal_equations(pairs);
  const double r = ridge.value_or(default_ridge(eq.H.trace(), eq.count));
  if (r < 0.0 || !std::isfinite(r)) {
    throw InvalidArgument("ridge must be finite and non-negative");
  }
  return {solve_symmetric(eq.H, r, eq.g, "mixture of embeddings")};
}

MixtureDistributionModel fit_mixture_distributions(const TrainingPairs& pairs) {
  const NormalEquations eq = normal_equations(pairs);
  if (eq.H.rows() == 1) {
    return {Eigen::VectorXd::Ones(1)};
  }
  return {solve(SimplexQPProblem{eq.H, eq.g}).theta};
}

Embedding predict_embedding(std::span<const double> coeffs, std::span<const Embedding> inputs) {
  if (coeffs.size() != inputs.size()) {
    throw InvalidArgument("predict: model expects " + std::to_string(coeffs.size()) +
                          " inputs, got " + std::to_string(inputs.size()));
  }
  return combine(inputs, coeffs);
}

Embedding predict_embedding(const MixtureEmbeddingModel& model, std::span<const Embedding> inputs) {
  return predict_embedding(
      std::span<const double>(model.alpha.data(), static_cast<std::size_t>(model.alpha.size())),
      inputs);
}

Embedding predict_embedding(const MixtureDistributionModel& model,
                            std::span<const Embedding> inputs) {
  return predict_embedding(
      std::span<const double>(model.w.data(), static_cast<std::size_t>(model.w.size())), inputs);
}

double projected_operator_error(const TrainingPairs& pairs) {
  require_single_input(pairs, "projected operator error");
  const std::vector<Embedding> q = first_inputs(pairs);
  const std::vector<Embedding> p = all_outputs(pairs);
  const Eigen::MatrixXd g_pp = symmetric_gram(p);
  const Eigen::MatrixXd g_qq = symmetric_gram(q);
  const Eigen::MatrixXd g_pq = input_gram(p, q);
  const auto k = static_cast<Eigen::Index>(pairs.count());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd g_qq_inv = solve_symmetric(g_qq, 0.0, id, "projected error");
  const Eigen::MatrixXd g_pp_inv = solve_symmetric(g_pp, 0.0, id, "projected error");
  // Pi_P Pi_Q = M_P X1 M_Q^T and L_hat = M_P X2 M_Q^T.
  const Eigen::MatrixXd x1 = g_pp_inv * g_pq * g_qq_inv;
  const Eigen::MatrixXd diff = x1 - g_qq_inv;
  const double hs2 = (diff.transpose() * g_pp * diff * g_qq).trace();
  return std::sqrt(std::max(0.0, hs2));
}

}  // namespace distreg
