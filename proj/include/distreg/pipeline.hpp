#pragma once

// Network interference pipeline: journey aggregation, input functionals,
// training of the mixture-of-embeddings model, rescaled-marginal basis and
// prediction by simplex projection.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "distreg/config.hpp"
#include "distreg/kernel_embedding.hpp"
#include "distreg/network.hpp"
#include "distreg/regression.hpp"
#include "distreg/sampler.hpp"

namespace distreg {

struct JourneyRecord {
  NodeId origin = 0;
  NodeId destination = 0;
  int t_entry = 0;
  int t_exit = 0;

  friend bool operator==(const JourneyRecord&, const JourneyRecord&) = default;
};

/// Ordered by destination, then exit minute, then origin, so the exits at a
/// station during a time window form one contiguous range.
struct CountKey {
  NodeId destination = 0;
  int minute = 0;
  NodeId origin = 0;

  friend auto operator<=>(const CountKey&, const CountKey&) = default;
};

/// Sparse exit-count tensor y_{o d t} of one day.
struct DayCounts {
  int day = 0;
  std::map<CountKey, std::uint32_t> counts;

  std::uint64_t total() const;
  friend bool operator==(const DayCounts&, const DayCounts&) = default;
};

struct Disruption {
  int day = 0;
  int t_start = 0;
  int t_end = 0;
  std::vector<NodeId> roi;

  /// Checks t_start <= t_end inside the window and a non-empty duplicate-free roi.
  void validate(std::size_t n_nodes, const TimeWindow& window) const;
  friend bool operator==(const Disruption&, const Disruption&) = default;
};

struct PerturbedObservation {
  Disruption disruption;
  std::vector<std::int64_t> exit_vector;
};

DayCounts aggregate_day(int day, std::span<const JourneyRecord> journeys, std::size_t n_nodes,
                        const TimeWindow& window = {});

/// Exits at each ROI station, all origins, minutes in [t_start, t_end].
std::vector<std::int64_t> roi_exit_vector(const DayCounts& dc, const Disruption& z);

/// Per ROI station j, per origin o: whether o -> ROI_j stays within the detour
/// threshold once the other ROI stations are cut out of the graph.
/// 1 = feasible, 0 = infeasible, -1 = not connected in the natural graph.
std::vector<std::vector<std::int8_t>> origin_feasibility(const Graph& g, const Disruption& z,
                                                         const InterferenceConfig& cfg);

/// Realizations of X1..X5 (X4 omitted when cfg.drop_x4), one row per day in
/// `days` other than z.day.
std::vector<SampleSet> input_variable_samples(std::span<const DayCounts> days, const Disruption& z,
                                              const Graph& g, const InterferenceConfig& cfg);

/// I sets; set i scales coordinate d by exp(-i * beta * dist(d, center)).
std::vector<SampleSet> decay_inputs(const SampleSet& natural, NodeId center, const Graph& g,
                                    double beta, std::size_t I);

/// Kernel bandwidth from the median heuristic: per observation, pool the
/// input samples with the observed vector; take the median over observations.
KernelConfig auto_kernel(std::span<const DayCounts> days,
                         std::span<const PerturbedObservation> observations, const Graph& g,
                         const InterferenceConfig& cfg);

/// Kernel for training on `observations`: fixed rho, or the median heuristic.
KernelConfig resolve_kernel(std::span<const DayCounts> days,
                            std::span<const PerturbedObservation> observations, const Graph& g,
                            const InterferenceConfig& cfg);

struct InterferenceModel {
  MixtureEmbeddingModel mixture;
  KernelConfig kernel;
};

InterferenceModel train(std::span<const DayCounts> days,
                        std::span<const PerturbedObservation> observations, const Graph& g,
                        const InterferenceConfig& cfg, const KernelConfig& kernel);

/// R * |ROI| rescaled natural marginals, component (r, j) supported on coordinate j.
Basis build_basis(std::span<const DayCounts> days, const Disruption& z,
                  const InterferenceConfig& cfg, const KernelConfig& kernel);

struct Prediction {
  FittedMixture mixture;
  SampleSet samples;
};

Prediction predict(const InterferenceModel& model, std::span<const DayCounts> days,
                   const Disruption& z, const Graph& g, const InterferenceConfig& cfg,
                   std::size_t n_samples, std::uint64_t seed);

}  // namespace distreg
