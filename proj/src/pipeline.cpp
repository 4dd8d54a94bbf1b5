#include "distreg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "distreg/error.hpp"

namespace distreg {

namespace {

// Calls fn(origin, count) for every exit at station d during [t0, t1].
template <typename Fn>
void for_each_exit(const DayCounts& dc, NodeId d, int t0, int t1, Fn&& fn) {
  auto it = dc.counts.lower_bound(CountKey{d, t0, 0});
  const CountKey last{d, t1, std::numeric_limits<NodeId>::max()};
  for (; it != dc.counts.end() && !(last < it->first); ++it) {
    fn(it->first.origin, it->second);
  }
}

std::size_t count_other_days(std::span<const DayCounts> days, int excluded) {
  return static_cast<std::size_t>(std::count_if(
      days.begin(), days.end(), [&](const DayCounts& dc) { return dc.day != excluded; }));
}

SampleSet singleton(const std::vector<std::int64_t>& v) {
  std::vector<double> row(v.begin(), v.end());
  const std::size_t dim = row.size();
  return SampleSet(dim, std::move(row));
}

std::vector<Embedding> embed_all(const KernelConfig& k, const std::vector<SampleSet>& sets) {
  std::vector<Embedding> out;
  out.reserve(sets.size());
  for (const auto& s : sets) {
    out.push_back(embed(k, s));
  }
  return out;
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace

std::uint64_t DayCounts::total() const {
  std::uint64_t t = 0;
  for (const auto& [key, c] : counts) {
    t += c;
  }
  return t;
}

void Disruption::validate(std::size_t n_nodes, const TimeWindow& window) const {
  if (t_start > t_end) {
    throw InvalidArgument("disruption: t_start must not exceed t_end");
  }
  if (!window.contains(t_start) || !window.contains(t_end)) {
    throw InvalidArgument("disruption: times outside the observation window");
  }
  if (roi.empty()) {
    throw InvalidArgument("disruption: empty ROI");
  }
  std::set<NodeId> seen;
  for (NodeId v : roi) {
    if (v >= n_nodes) {
      throw InvalidArgument("disruption: ROI node " + std::to_string(v) + " out of range");
    }
    if (!seen.insert(v).second) {
      throw InvalidArgument("disruption: duplicate ROI node " + std::to_string(v));
    }
  }
}

DayCounts aggregate_day(int day, std::span<const JourneyRecord> journeys, std::size_t n_nodes,
                        const TimeWindow& window) {
  DayCounts dc;
  dc.day = day;
  for (std::size_t row = 0; row < journeys.size(); ++row) {
    const JourneyRecord& j = journeys[row];
    if (j.origin >= n_nodes || j.destination >= n_nodes) {
      throw InvalidArgument("journey record " + std::to_string(row) + " of day " +
                            std::to_string(day) + ": station id out of range");
    }
    if (j.t_entry > j.t_exit || !window.contains(j.t_entry) || !window.contains(j.t_exit)) {
      throw InvalidArgument("journey record " + std::to_string(row) + " of day " +
                            std::to_string(day) + ": invalid times");
    }
    ++dc.counts[CountKey{j.destination, j.t_exit, j.origin}];
  }
  return dc;
}

std::vector<std::int64_t> roi_exit_vector(const DayCounts& dc, const Disruption& z) {
  if (dc.day != z.day) {
    throw InvalidArgument("roi_exit_vector: counts of day " + std::to_string(dc.day) +
                          " given for a disruption on day " + std::to_string(z.day));
  }
  std::vector<std::int64_t> out(z.roi.size(), 0);
  for (std::size_t j = 0; j < z.roi.size(); ++j) {
    for_each_exit(dc, z.roi[j], z.t_start, z.t_end,
                  [&](NodeId, std::uint32_t c) { out[j] += c; });
  }
  return out;
}

std::vector<std::vector<std::int8_t>> origin_feasibility(const Graph& g, const Disruption& z,
                                                         const InterferenceConfig& cfg) {
  z.validate(g.size(), cfg.window);
  std::vector<std::vector<std::int8_t>> out;
  out.reserve(z.roi.size());
  for (NodeId dest : z.roi) {
    std::vector<NodeId> others;
    for (NodeId v : z.roi) {
      if (v != dest) {
        others.push_back(v);
      }
    }
    const std::vector<int> natural = bfs_distance(g, dest);
    const std::vector<int> disrupted = bfs_distance(disrupted_adjacency(g, others), dest);
    std::vector<std::int8_t> row(g.size(), -1);
    for (std::size_t o = 0; o < g.size(); ++o) {
      if (natural[o] != kUnreachable) {
        row[o] = detour_score_from_distances(natural[o], disrupted[o], cfg.g_convention) <= cfg.xi
                     ? 1
                     : 0;
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<SampleSet> input_variable_samples(std::span<const DayCounts> days, const Disruption& z,
                                              const Graph& g, const InterferenceConfig& cfg) {
  const std::size_t n_days = count_other_days(days, z.day);
  if (n_days == 0) {
    throw InvalidArgument("no natural days left after excluding the disruption day");
  }
  const auto feas = origin_feasibility(g, z, cfg);
  const std::size_t m = z.roi.size();
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> x3;
  x1.reserve(n_days * m);
  x2.reserve(n_days * m);
  x3.reserve(n_days * m);
  for (const DayCounts& dc : days) {
    if (dc.day == z.day) {
      continue;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double feasible_exits = 0.0;
      double infeasible_exits = 0.0;
      for_each_exit(dc, z.roi[j], z.t_start, z.t_end, [&](NodeId o, std::uint32_t c) {
        if (o >= feas[j].size() || feas[j][o] < 0) {
          throw InvalidArgument("journey from " + std::to_string(o) + " to " +
                                std::to_string(z.roi[j]) + " on day " + std::to_string(dc.day) +
                                " has no path in the natural graph");
        }
        (feas[j][o] ? feasible_exits : infeasible_exits) += c;
      });
      x1.push_back(feasible_exits);
      x2.push_back(infeasible_exits);
      x3.push_back(feasible_exits + infeasible_exits);
    }
  }

  std::vector<double> column_mean(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t r = 0; r < n_days; ++r) {
      column_mean[j] += x3[r * m + j];
    }
    column_mean[j] /= static_cast<double>(n_days);
  }
  std::vector<double> x4;
  std::vector<double> x5;
  x4.reserve(n_days * m);
  x5.reserve(n_days * m);
  for (std::size_t r = 0; r < n_days; ++r) {
    double roi_total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      roi_total += x3[r * m + j];
    }
    const double broadcast =
        cfg.x5_mode == X5Mode::mean ? roi_total / static_cast<double>(m) : roi_total;
    x4.insert(x4.end(), column_mean.begin(), column_mean.end());
    x5.insert(x5.end(), m, broadcast);
  }

  std::vector<SampleSet> sets;
  sets.emplace_back(m, std::move(x1));
  sets.emplace_back(m, std::move(x2));
  sets.emplace_back(m, std::move(x3));
  if (!cfg.drop_x4) {
    sets.emplace_back(m, std::move(x4));
  }
  sets.emplace_back(m, std::move(x5));
  return sets;
}

std::vector<SampleSet> decay_inputs(const SampleSet& natural, NodeId center, const Graph& g,
                                    double beta, std::size_t I) {
  if (natural.dim() != g.size()) {
    throw InvalidArgument("decay_inputs: samples must have one coordinate per node");
  }
  if (!(beta > 0.0)) {
    throw InvalidArgument("decay_inputs: beta must be > 0");
  }
  const std::vector<int> dist = bfs_distance(g, center);
  std::vector<SampleSet> out;
  for (std::size_t i = 1; i <= I; ++i) {
    std::vector<double> factor(g.size());
    for (std::size_t d = 0; d < g.size(); ++d) {
      factor[d] = dist[d] == kUnreachable
                      ? 0.0
                      : std::exp(-static_cast<double>(i) * beta * static_cast<double>(dist[d]));
    }
    std::vector<double> rows = natural.data();
    for (std::size_t n = 0; n < natural.size(); ++n) {
      for (std::size_t d = 0; d < g.size(); ++d) {
        rows[n * g.size() + d] *= factor[d];
      }
    }
    out.emplace_back(g.size(), std::move(rows));
  }
  return out;
}

KernelConfig auto_kernel(std::span<const DayCounts> days,
                         std::span<const PerturbedObservation> observations, const Graph& g,
                         const InterferenceConfig& cfg) {
  std::vector<double> rhos;
  for (const auto& obs : observations) {
    const auto sets = input_variable_samples(days, obs.disruption, g, cfg);
    std::vector<double> pooled;
    for (const auto& s : sets) {
      pooled.insert(pooled.end(), s.data().begin(), s.data().end());
    }
    pooled.insert(pooled.end(), obs.exit_vector.begin(), obs.exit_vector.end());
    try {
      rhos.push_back(median_heuristic(SampleSet(sets.front().dim(), std::move(pooled)),
                                      cfg.kernel_family));
    } catch (const InvalidArgument&) {
      // Degenerate (all identical) pools carry no scale information.
    }
  }
  if (rhos.empty()) {
    throw InvalidArgument("cannot pick a kernel bandwidth automatically; set kernel.rho");
  }
  return KernelConfig(cfg.kernel_family, median_of(std::move(rhos)));
}

KernelConfig resolve_kernel(std::span<const DayCounts> days,
                            std::span<const PerturbedObservation> observations, const Graph& g,
                            const InterferenceConfig& cfg) {
  if (cfg.rho_mode == RhoMode::fixed) {
    return KernelConfig(cfg.kernel_family, cfg.rho);
  }
  return auto_kernel(days, observations, g, cfg);
}

InterferenceModel train(std::span<const DayCounts> days,
                        std::span<const PerturbedObservation> observations, const Graph& g,
                        const InterferenceConfig& cfg, const KernelConfig& kernel) {
  if (observations.empty()) {
    throw InvalidArgument("train: need at least one observed disruption");
  }
  if (cfg.I != cfg.network_arity()) {
    throw InvalidArgument("train: I = " + std::to_string(cfg.I) + " but the network inputs give " +
                          std::to_string(cfg.network_arity()));
  }
  std::vector<std::vector<Embedding>> inputs;
  std::vector<Embedding> outputs;
  for (const auto& obs : observations) {
    if (obs.exit_vector.size() != obs.disruption.roi.size()) {
      throw InvalidArgument("observation length does not match its ROI");
    }
    inputs.push_back(embed_all(kernel, input_variable_samples(days, obs.disruption, g, cfg)));
    outputs.push_back(embed(kernel, singleton(obs.exit_vector)));
  }
  return {fit_mixture_embeddings(TrainingPairs(std::move(inputs), std::move(outputs)), cfg.ridge),
          kernel};
}

Basis build_basis(std::span<const DayCounts> days, const Disruption& z,
                  const InterferenceConfig& cfg, const KernelConfig& kernel) {
  if (cfg.R < 2 || !(cfg.c > 1.0)) {
    throw InvalidArgument("build_basis: need R >= 2 and c > 1");
  }
  const std::size_t m = z.roi.size();
  std::vector<std::vector<double>> totals(m);
  for (const DayCounts& dc : days) {
    if (dc.day == z.day) {
      continue;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double t = 0.0;
      for_each_exit(dc, z.roi[j], z.t_start, z.t_end, [&](NodeId, std::uint32_t c) { t += c; });
      totals[j].push_back(t);
    }
  }
  if (totals.front().empty()) {
    throw InvalidArgument("build_basis: no natural days left after excluding the disruption day");
  }
  double max_mean = 0.0;
  for (const auto& t : totals) {
    double s = 0.0;
    for (double v : t) {
      s += v;
    }
    max_mean = std::max(max_mean, s / static_cast<double>(t.size()));
  }
  if (!(max_mean > 0.0)) {
    throw InvalidArgument("build_basis: no natural traffic at any ROI station in the window");
  }
  const double step = cfg.c / static_cast<double>(cfg.R - 1) * max_mean;
  std::vector<SampleSet> components;
  std::vector<std::string> labels;
  for (std::size_t r = 1; r <= cfg.R; ++r) {
    const double lambda = 1.0 + static_cast<double>(r - 1) * step;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> rows(totals[j].size() * m, 0.0);
      for (std::size_t n = 0; n < totals[j].size(); ++n) {
        rows[n * m + j] = lambda * totals[j][n];
      }
      components.emplace_back(m, std::move(rows));
      labels.push_back("r" + std::to_string(r) + "_s" + std::to_string(z.roi[j]));
    }
  }
  return Basis(kernel, std::move(components), std::move(labels));
}

Prediction predict(const InterferenceModel& model, std::span<const DayCounts> days,
                   const Disruption& z, const Graph& g, const InterferenceConfig& cfg,
                   std::size_t n_samples, std::uint64_t seed) {
  const auto inputs = embed_all(model.kernel, input_variable_samples(days, z, g, cfg));
  const Embedding target = predict_embedding(model.mixture, inputs);
  FittedMixture mixture = fit_mixture_weights(target, build_basis(days, z, cfg, model.kernel));
  SampleSet samples = sample_mixture(mixture, n_samples, seed);
  return {std::move(mixture), std::move(samples)};
}

}  // namespace distreg
