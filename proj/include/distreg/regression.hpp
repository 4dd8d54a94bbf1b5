#pragma once

// Distribution-to-distribution regression in the RKHS of mean embeddings.
//
// Four model classes are provided:
//  - a non-parametric operator mapping the span of training input embeddings
//    onto the span of training output embeddings,
//  - a one-parameter model L = alpha * identity,
//  - a mixture of embeddings L[f_1..f_I] = sum_i alpha_i f_i (alpha free),
//  - a mixture of distributions, the same form with w on the simplex.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "distreg/kernel_embedding.hpp"

namespace distreg {

/// K training pairs; pair k has I input embeddings and one output embedding.
class TrainingPairs {
 public:
  TrainingPairs(std::vector<std::vector<Embedding>> inputs, std::vector<Embedding> outputs);

  /// Single-input convenience constructor (I = 1).
  static TrainingPairs single_input(std::vector<Embedding> inputs, std::vector<Embedding> outputs);

  std::size_t count() const noexcept { return outputs_.size(); }
  std::size_t arity() const noexcept { return inputs_.front().size(); }
  const std::vector<Embedding>& inputs(std::size_t k) const { return inputs_[k]; }
  const Embedding& output(std::size_t k) const { return outputs_[k]; }
  const KernelConfig& kernel() const noexcept { return outputs_.front().kernel(); }

 private:
  std::vector<std::vector<Embedding>> inputs_;
  std::vector<Embedding> outputs_;
};

struct NonParametricOperator {
  std::vector<Embedding> train_inputs;
  std::vector<Embedding> train_outputs;
  /// (m_QQ + ridge I)^{-1}, m_QQ the K x K Gram of training input embeddings.
  Eigen::MatrixXd coeff;
  double ridge = 0.0;
};

struct OneParameterModel {
  double alpha = 0.0;
};

struct MixtureEmbeddingModel {
  Eigen::VectorXd alpha;
};

struct MixtureDistributionModel {
  Eigen::VectorXd w;
};

/// Quadratic form of the multi-input least-squares problem:
///   sum_k ||mu_P^(k) - M_Q^(k) a||^2 = output_energy - 2 g^T a + a^T H a.
struct NormalEquations {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  double output_energy = 0.0;
  std::size_t count = 0;
};

NormalEquations normal_equations(const TrainingPairs& pairs);
double training_objective(const NormalEquations& eq, const Eigen::VectorXd& coeffs);

/// Default ridge: 1e-8 * trace / K.
double default_ridge(double trace, std::size_t count);

/// Requires arity 1. ridge = nullopt selects default_ridge; with ridge = 0 a
/// numerically singular Gram raises NumericalError.
NonParametricOperator fit_nonparametric(const TrainingPairs& pairs,
                                        std::optional<double> ridge = std::nullopt);
Embedding apply_nonparametric(const NonParametricOperator& op, const Embedding& q);

/// alpha = trace(m_PQ) / trace(m_QQ) over the diagonal (k = k') blocks.
OneParameterModel fit_one_parameter(const TrainingPairs& pairs);

MixtureEmbeddingModel fit_mixture_embeddings(const TrainingPairs& pairs,
                                             std::optional<double> ridge = std::nullopt);
MixtureDistributionModel fit_mixture_distributions(const TrainingPairs& pairs);

/// sum_i coeffs[i] * inputs[i].
Embedding predict_embedding(std::span<const double> coeffs, std::span<const Embedding> inputs);
Embedding predict_embedding(const MixtureEmbeddingModel& model, std::span<const Embedding> inputs);
Embedding predict_embedding(const MixtureDistributionModel& model,
                            std::span<const Embedding> inputs);

/// Hilbert-Schmidt norm of Pi_P Pi_Q - Pi_P L_hat Pi_Q for an identity ground
/// truth, evaluated through K x K Gram algebra. Requires arity 1.
double projected_operator_error(const TrainingPairs& pairs);

}  // namespace distreg
