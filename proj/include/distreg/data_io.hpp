#pragma once

// CSV ingestion of journeys, disruptions and graphs, and the synthetic
// scenario generator with its ground-truth record.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "distreg/config.hpp"
#include "distreg/network.hpp"
#include "distreg/pipeline.hpp"

namespace distreg {

/// Journeys grouped by day. A file either has a `day` column or a name ending
/// in `_<day>.csv`; a directory loads every `journeys*.csv` inside it.
/// n_nodes = 0 skips the id range check.
std::map<int, std::vector<JourneyRecord>> load_journeys(const std::string& path,
                                                        std::size_t n_nodes = 0,
                                                        const TimeWindow& window = {});
void write_journeys(const std::string& path, const std::vector<JourneyRecord>& journeys);

std::vector<Disruption> load_disruptions(const std::string& path);
void write_disruptions(const std::string& path, const std::vector<Disruption>& disruptions);

/// Edge list `u,v`; node count is the largest id + 1 unless n_nodes is given.
Graph load_graph(const std::string& path, std::size_t n_nodes = 0);
void write_graph(const std::string& path, const Graph& g);

struct GroundTruthRow {
  std::size_t disruption = 0;
  int day = 0;
  NodeId station = 0;
  double expected_natural = 0.0;    // expected window exits on a natural day
  double expected_perturbed = 0.0;  // expected window exits on the disruption day
  double retained_fraction = 0.0;   // ratio of the two

  friend bool operator==(const GroundTruthRow&, const GroundTruthRow&) = default;
};

std::vector<GroundTruthRow> load_ground_truth(const std::string& path);
void write_ground_truth(const std::string& path, const std::vector<GroundTruthRow>& rows);

enum class Topology { path, cycle, grid, erdos_renyi };
enum class PerturbationMode { recovery, misspecified };

std::string to_string(Topology t);
Topology parse_topology(const std::string& name);

struct SyntheticScenario {
  Topology topology = Topology::grid;
  std::size_t nodes = 30;
  double edge_probability = 0.2;  // erdos-renyi only
  std::size_t days = 30;
  std::size_t disruptions = 12;
  double phi = 0.8;
  // rate_od = rate * exp(-decay * (dist(o, d) - 1)) journeys per day, o != d.
  double rate = 2.0;
  double decay = 0.0;
  PerturbationMode mode = PerturbationMode::recovery;
  double shock_sigma = 0.5;
  int duration = 120;
  double xi = 0.25;
  TimeWindow window;
  std::uint64_t seed = 1;

  void validate() const;
  friend bool operator==(const SyntheticScenario&, const SyntheticScenario&) = default;
};

SyntheticScenario parse_scenario(const std::string& text);
SyntheticScenario load_scenario(const std::string& path);
std::string format_scenario(const SyntheticScenario& s);

Graph make_topology(const SyntheticScenario& s);

struct Dataset {
  Graph graph{1};
  std::map<int, std::vector<JourneyRecord>> journeys;
  std::vector<Disruption> disruptions;
  std::vector<GroundTruthRow> ground_truth;

  /// Day counts of every day, in day order.
  std::vector<DayCounts> day_counts(const TimeWindow& window = {}) const;
  /// Disruption with its observed ROI exit vector.
  std::vector<PerturbedObservation> observations(const std::vector<DayCounts>& days) const;
};

/// Natural days draw Poisson OD counts with uniform exit minutes. On a
/// disruption day, journeys bound for an ROI station during the window whose
/// origin is infeasible are re-destined with probability phi to the nearest
/// station outside the ROI (misspecified mode: every ROI-bound journey with
/// probability 1 - s, s a capped lognormal shock per station).
Dataset generate_synthetic(const SyntheticScenario& s);

/// Flat key = value file holding the kernel and the fitted alpha.
void write_model(const std::string& path, const InterferenceModel& model);
InterferenceModel load_model(const std::string& path);

/// Writes graph.csv, disruptions.csv, journeys_<day>.csv and, when present,
/// ground_truth.csv into dir (created if missing).
void write_dataset(const std::string& dir, const Dataset& data);
Dataset load_dataset(const std::string& dir, const TimeWindow& window = {});

}  // namespace distreg
