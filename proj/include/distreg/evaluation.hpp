#pragma once

// Disruption scoring, the k-fold protocol and the comparison of the proposed
// model against the natural-regime baseline and a uniformly random mixture.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "distreg/config.hpp"
#include "distreg/kernel_embedding.hpp"
#include "distreg/pipeline.hpp"
#include "distreg/sampler.hpp"

namespace distreg {

/// sum_day ||x1 - x2||^2 / sum_day ||x1||^2 over matching rows.
double observable_score(const SampleSet& x1, const SampleSet& x2);
/// ||natural_mean - observed||^2 / ||natural_mean||^2.
double severity_score(std::span<const double> observed, std::span<const double> natural_mean);
double severity_score(const DayCounts& disruption_day, std::span<const double> natural_mean,
                      const Disruption& z);

struct ScoreRecord {
  std::size_t id = 0;
  double observable = 0.0;
  double severity = 0.0;
  bool selected = false;
  std::string error;  // non-empty when the scores could not be computed
};

/// Indices of the n largest scores, ties by index ascending, in index order.
std::vector<std::size_t> select_top(std::span<const double> scores, std::size_t n);

std::vector<ScoreRecord> score_disruptions(std::span<const DayCounts> days,
                                           std::span<const Disruption> disruptions,
                                           const Graph& g, const InterferenceConfig& cfg,
                                           std::size_t top);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, then k folds whose sizes differ by at most one.
std::vector<Fold> kfold(std::span<const std::size_t> ids, std::size_t k, std::uint64_t seed);

/// Per-coordinate log of the normalized Gaussian KDE
/// sqrt(h / pi) / N * sum_n exp(-h (y_j - s_nj)^2).
std::vector<double> kde_log_density(const SampleSet& samples, std::span<const double> h,
                                    std::span<const double> y);
std::vector<double> kde_log_density(const SampleSet& samples, double h, std::span<const double> y);

/// Silverman bandwidth per coordinate, returned as h = 1 / (2 sigma^2).
std::vector<double> silverman_h(const SampleSet& samples);

struct NllResult {
  double nll = 0.0;
  double log_nll = 0.0;
  bool log_defined = false;  // false when nll <= 0
};

NllResult nll(const SampleSet& samples, std::span<const double> observed,
              std::span<const double> h);

/// ||mean(samples) - observed||^2 / ||observed||^2.
double squared_error(const SampleSet& samples, std::span<const double> observed);
double squared_error(std::span<const double> mean, std::span<const double> observed);

/// Natural-day ROI totals (the X3 rows).
SampleSet baseline_model(std::span<const DayCounts> days, const Disruption& z, const Graph& g,
                         const InterferenceConfig& cfg);

/// Flat Dirichlet draw via normalized exponential spacings.
Eigen::VectorXd random_theta(std::size_t n, std::uint64_t seed);
SampleSet random_model(const Basis& basis, std::uint64_t seed, std::size_t n);

/// sum_i theta_i mean(component_i).
std::vector<double> mixture_mean(const Basis& basis, const Eigen::VectorXd& theta);

/// Picks rho from multiples of the median-heuristic value by leave-one-out
/// squared error over the training observations.
KernelConfig cross_validated_kernel(std::span<const DayCounts> days,
                                    std::span<const PerturbedObservation> observations,
                                    const Graph& g, const InterferenceConfig& cfg);

struct EvalRow {
  std::size_t id = 0;
  std::size_t fold = 0;
  double model_nll = 0.0;
  double baseline_nll = 0.0;
  double random_nll = 0.0;
  double model_se = 0.0;
  double baseline_se = 0.0;
  double random_se = 0.0;
  double rho = 0.0;
  std::string error;
};

struct DensityGrid {
  std::size_t id = 0;
  NodeId station = 0;
  std::vector<double> y;
  std::vector<double> p_model;
  std::vector<double> p_baseline;
};

struct EvalReport {
  std::vector<Fold> folds;
  std::vector<EvalRow> rows;  // ordered by id
  std::vector<DensityGrid> densities;

  std::size_t failures() const;
  /// Share of successful rows with model_nll < random_nll.
  double model_beats_random_nll() const;
  /// Share of successful rows with model_se < baseline_se.
  double model_beats_baseline_se() const;
};

/// observations[id] is disruption id; only `selected` ids take part.
EvalReport run_evaluation(std::span<const DayCounts> days,
                          std::span<const PerturbedObservation> observations, const Graph& g,
                          const InterferenceConfig& cfg, std::span<const std::size_t> selected,
                          std::size_t folds, std::size_t grid_points = 101);

void write_scores(const std::string& path, std::span<const ScoreRecord> scores);
void write_metrics(const std::string& path, const EvalReport& report);
/// One density_<id>_<station>.csv per grid.
void write_densities(const std::string& dir, const EvalReport& report);

}  // namespace distreg
