#include "distreg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>

#include "distreg/error.hpp"
#include "distreg/random.hpp"
#include "distreg/regression.hpp"

namespace distreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_real(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidArgument("cannot write " + path);
  }
  return out;
}

std::vector<double> as_real(const std::vector<std::int64_t>& v) {
  return {v.begin(), v.end()};
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> bandwidths(const InterferenceConfig& cfg, const SampleSet& samples) {
  if (cfg.kde_h) {
    return std::vector<double>(samples.dim(), *cfg.kde_h);
  }
  return silverman_h(samples);
}

std::vector<PerturbedObservation> pick(std::span<const PerturbedObservation> all,
                                       std::span<const std::size_t> ids) {
  std::vector<PerturbedObservation> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    out.push_back(all[id]);
  }
  return out;
}

std::vector<double> predicted_mean(const InterferenceModel& model, std::span<const DayCounts> days,
                                   const Disruption& z, const Graph& g,
                                   const InterferenceConfig& cfg) {
  std::vector<Embedding> inputs;
  for (const auto& s : input_variable_samples(days, z, g, cfg)) {
    inputs.push_back(embed(model.kernel, s));
  }
  const FittedMixture fm = fit_mixture_weights(predict_embedding(model.mixture, inputs),
                                               build_basis(days, z, cfg, model.kernel));
  return mixture_mean(fm.basis, fm.theta);
}

}  // namespace

double observable_score(const SampleSet& x1, const SampleSet& x2) {
  if (x1.dim() != x2.dim() || x1.size() != x2.size()) {
    throw InvalidArgument("observable_score: shape mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x1.data().size(); ++i) {
    const double a = x1.data()[i];
    const double d = a - x2.data()[i];
    num += d * d;
    den += a * a;
  }
  if (!(den > 0.0)) {
    throw InvalidArgument("observable_score: no feasible-origin exits");
  }
  return num / den;
}

double severity_score(std::span<const double> observed, std::span<const double> natural_mean) {
  if (observed.size() != natural_mean.size()) {
    throw InvalidArgument("severity_score: length mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    const double d = natural_mean[j] - observed[j];
    num += d * d;
    den += natural_mean[j] * natural_mean[j];
  }
  if (!(den > 0.0)) {
    throw InvalidArgument("severity_score: zero natural traffic in the ROI");
  }
  return num / den;
}

double severity_score(const DayCounts& disruption_day, std::span<const double> natural_mean,
                      const Disruption& z) {
  return severity_score(as_real(roi_exit_vector(disruption_day, z)), natural_mean);
}

std::vector<std::size_t> select_top(std::span<const double> scores, std::size_t n) {
  if (n > scores.size()) {
    throw InvalidArgument("select_top: n exceeds the number of scores");
  }
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = i;
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<ScoreRecord> score_disruptions(std::span<const DayCounts> days,
                                           std::span<const Disruption> disruptions,
                                           const Graph& g, const InterferenceConfig& cfg,
                                           std::size_t top) {
  std::vector<ScoreRecord> out(disruptions.size());
  std::vector<double> ranking(disruptions.size(), -std::numeric_limits<double>::infinity());
  std::size_t ok = 0;
  for (std::size_t k = 0; k < disruptions.size(); ++k) {
    const Disruption& z = disruptions[k];
    out[k].id = k;
    try {
      const auto sets = input_variable_samples(days, z, g, cfg);
      const auto it = std::find_if(days.begin(), days.end(),
                                   [&](const DayCounts& dc) { return dc.day == z.day; });
      if (it == days.end()) {
        throw InvalidArgument("no counts for day " + std::to_string(z.day));
      }
      out[k].observable = observable_score(sets[0], sets[1]);
      out[k].severity = severity_score(*it, sets[2].mean(), z);
      ranking[k] = out[k].observable;
      ++ok;
    } catch (const Error& e) {
      out[k].observable = kNaN;
      out[k].severity = kNaN;
      out[k].error = e.what();
    }
  }
  for (std::size_t id : select_top(ranking, std::min(top, ok))) {
    out[id].selected = true;
  }
  return out;
}

std::vector<Fold> kfold(std::span<const std::size_t> ids, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > ids.size()) {
    throw InvalidArgument("kfold: need 1 <= k <= " + std::to_string(ids.size()));
  }
  std::vector<std::size_t> order(ids.begin(), ids.end());
  const CounterRng rng(seed, 3);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i, i + 1)]);
  }
  std::vector<Fold> folds(k);
  const std::size_t base = order.size() / k;
  const std::size_t extra = order.size() % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].test.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                         order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(folds[f].test.begin(), folds[f].test.end());
    pos += len;
  }
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t id : ids) {
      if (!std::binary_search(folds[f].test.begin(), folds[f].test.end(), id)) {
        folds[f].train.push_back(id);
      }
    }
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

std::vector<double> kde_log_density(const SampleSet& samples, std::span<const double> h,
                                    std::span<const double> y) {
  if (h.size() != samples.dim() || y.size() != samples.dim()) {
    throw InvalidArgument("kde_log_density: dimension mismatch");
  }
  const std::size_t n = samples.size();
  const auto& cols = samples.columns();
  std::vector<double> out(samples.dim());
  std::vector<double> a(n);
  for (std::size_t j = 0; j < samples.dim(); ++j) {
    if (!(h[j] > 0.0) || !std::isfinite(h[j])) {
      throw InvalidArgument("kde_log_density: h must be finite and > 0");
    }
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[j] - cols[j * n + i];
      a[i] = -h[j] * d * d;
      top = std::max(top, a[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += std::exp(a[i] - top);
    }
    out[j] = top + std::log(s) + 0.5 * std::log(h[j] / std::numbers::pi) -
             std::log(static_cast<double>(n));
  }
  return out;
}

std::vector<double> kde_log_density(const SampleSet& samples, double h,
                                    std::span<const double> y) {
  const std::vector<double> hv(samples.dim(), h);
  return kde_log_density(samples, hv, y);
}

std::vector<double> silverman_h(const SampleSet& samples) {
  const std::size_t n = samples.size();
  std::vector<double> out(samples.dim());
  for (std::size_t j = 0; j < samples.dim(); ++j) {
    std::vector<double> col(samples.columns().begin() + static_cast<std::ptrdiff_t>(j * n),
                            samples.columns().begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
    double mean = 0.0;
    for (double v : col) {
      mean += v;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) {
      ss += (v - mean) * (v - mean);
    }
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    const double iqr = quantile(col, 0.75) - quantile(col, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    const double sigma =
        std::max(0.5, 0.9 * spread * std::pow(static_cast<double>(n), -0.2));
    out[j] = 1.0 / (2.0 * sigma * sigma);
  }
  return out;
}

NllResult nll(const SampleSet& samples, std::span<const double> observed,
              std::span<const double> h) {
  NllResult r;
  for (double v : kde_log_density(samples, h, observed)) {
    r.nll -= v;
  }
  r.log_defined = r.nll > 0.0;
  r.log_nll = r.log_defined ? std::log(r.nll) : kNaN;
  return r;
}

double squared_error(std::span<const double> mean, std::span<const double> observed) {
  if (mean.size() != observed.size()) {
    throw InvalidArgument("squared_error: length mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < mean.size(); ++j) {
    num += (mean[j] - observed[j]) * (mean[j] - observed[j]);
    den += observed[j] * observed[j];
  }
  if (!(den > 0.0)) {
    throw InvalidArgument("squared_error: observed vector is zero");
  }
  return num / den;
}

double squared_error(const SampleSet& samples, std::span<const double> observed) {
  return squared_error(samples.mean(), observed);
}

SampleSet baseline_model(std::span<const DayCounts> days, const Disruption& z, const Graph& g,
                         const InterferenceConfig& cfg) {
  return input_variable_samples(days, z, g, cfg)[2];
}

Eigen::VectorXd random_theta(std::size_t n, std::uint64_t seed) {
  if (n == 0) {
    throw InvalidArgument("random_theta: empty basis");
  }
  const CounterRng rng(seed, 7);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    theta[static_cast<Eigen::Index>(i)] = -std::log(rng.uniform_open0(i));
  }
  return theta / theta.sum();
}

SampleSet random_model(const Basis& basis, std::uint64_t seed, std::size_t n) {
  return sample_mixture(basis, random_theta(basis.size(), seed), n, mix64(seed) + 1);
}

std::vector<double> mixture_mean(const Basis& basis, const Eigen::VectorXd& theta) {
  if (static_cast<std::size_t>(theta.size()) != basis.size()) {
    throw InvalidArgument("mixture_mean: theta length does not match the basis");
  }
  std::vector<double> out(basis.dim(), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto m = basis.components()[i].mean();
    for (std::size_t d = 0; d < out.size(); ++d) {
      out[d] += theta[static_cast<Eigen::Index>(i)] * m[d];
    }
  }
  return out;
}

KernelConfig cross_validated_kernel(std::span<const DayCounts> days,
                                    std::span<const PerturbedObservation> observations,
                                    const Graph& g, const InterferenceConfig& cfg) {
  const KernelConfig base = auto_kernel(days, observations, g, cfg);
  if (observations.size() < 2) {
    return base;
  }
  KernelConfig best = base;
  double best_loss = std::numeric_limits<double>::infinity();
  for (double mult : {1.0 / 4096, 1.0 / 1024, 1.0 / 256, 1.0 / 64, 1.0 / 16, 0.25, 1.0, 4.0}) {
    const KernelConfig kernel(cfg.kernel_family, base.rho() * mult);
    double loss = 0.0;
    std::size_t used = 0;
    for (std::size_t held = 0; held < observations.size(); ++held) {
      std::vector<PerturbedObservation> rest;
      for (std::size_t k = 0; k < observations.size(); ++k) {
        if (k != held) {
          rest.push_back(observations[k]);
        }
      }
      try {
        const InterferenceModel model = train(days, rest, g, cfg, kernel);
        const auto& obs = observations[held];
        loss += squared_error(predicted_mean(model, days, obs.disruption, g, cfg),
                              as_real(obs.exit_vector));
        ++used;
      } catch (const Error&) {
        loss = std::numeric_limits<double>::infinity();
        break;
      }
    }
    if (used > 0 && loss / static_cast<double>(used) < best_loss) {
      best_loss = loss / static_cast<double>(used);
      best = kernel;
    }
  }
  return best;
}

std::size_t EvalReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const EvalRow& r) { return !r.error.empty(); }));
}

double EvalReport::model_beats_random_nll() const {
  std::size_t wins = 0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.error.empty()) {
      ++n;
      wins += r.model_nll < r.random_nll ? 1 : 0;
    }
  }
  return n ? static_cast<double>(wins) / static_cast<double>(n) : 0.0;
}

double EvalReport::model_beats_baseline_se() const {
  std::size_t wins = 0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.error.empty()) {
      ++n;
      wins += r.model_se < r.baseline_se ? 1 : 0;
    }
  }
  return n ? static_cast<double>(wins) / static_cast<double>(n) : 0.0;
}

EvalReport run_evaluation(std::span<const DayCounts> days,
                          std::span<const PerturbedObservation> observations, const Graph& g,
                          const InterferenceConfig& cfg, std::span<const std::size_t> selected,
                          std::size_t folds, std::size_t grid_points) {
  cfg.validate();
  for (std::size_t id : selected) {
    if (id >= observations.size()) {
      throw InvalidArgument("run_evaluation: selected id " + std::to_string(id) + " out of range");
    }
  }
  if (grid_points < 2) {
    throw InvalidArgument("run_evaluation: need at least 2 grid points");
  }
  EvalReport report;
  report.folds = kfold(selected, folds, cfg.seed);

  std::optional<KernelConfig> global;
  if (cfg.rho_mode == RhoMode::auto_global) {
    global = auto_kernel(days, pick(observations, selected), g, cfg);
  }

  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const Fold& fold = report.folds[f];
    const auto train_obs = pick(observations, fold.train);
    std::optional<InterferenceModel> model;
    std::string fold_error;
    try {
      if (train_obs.empty()) {
        throw InvalidArgument("fold has no training disruptions");
      }
      KernelConfig kernel = global ? *global : resolve_kernel(days, train_obs, g, cfg);
      if (cfg.rho_mode == RhoMode::cv) {
        kernel = cross_validated_kernel(days, train_obs, g, cfg);
      }
      model = train(days, train_obs, g, cfg, kernel);
    } catch (const Error& e) {
      fold_error = std::string("training failed: ") + e.what();
    }

    for (std::size_t id : fold.test) {
      if (std::binary_search(fold.train.begin(), fold.train.end(), id)) {
        throw std::logic_error("disruption " + std::to_string(id) + " is in its own training fold");
      }
      EvalRow row;
      row.id = id;
      row.fold = f;
      row.model_nll = row.baseline_nll = row.random_nll = kNaN;
      row.model_se = row.baseline_se = row.random_se = kNaN;
      if (!model) {
        row.error = fold_error;
        report.rows.push_back(std::move(row));
        continue;
      }
      row.rho = model->kernel.rho();
      const PerturbedObservation& obs = observations[id];
      const Disruption& z = obs.disruption;
      const std::vector<double> observed = as_real(obs.exit_vector);
      try {
        const Prediction pred =
            predict(*model, days, z, g, cfg, cfg.samples, mix64(cfg.seed ^ mix64(2 * id + 1)));
        const SampleSet baseline = baseline_model(days, z, g, cfg);
        const SampleSet random =
            random_model(pred.mixture.basis, mix64(cfg.seed ^ mix64(2 * id + 2)), cfg.samples);

        const auto h_model = bandwidths(cfg, pred.samples);
        const auto h_base = bandwidths(cfg, baseline);
        const auto h_rand = bandwidths(cfg, random);
        row.model_nll = nll(pred.samples, observed, h_model).nll;
        row.baseline_nll = nll(baseline, observed, h_base).nll;
        row.random_nll = nll(random, observed, h_rand).nll;
        row.model_se = squared_error(pred.samples, observed);
        row.baseline_se = squared_error(baseline, observed);
        row.random_se = squared_error(random, observed);

        for (std::size_t j = 0; j < z.roi.size(); ++j) {
          double lo = observed[j];
          double hi = observed[j];
          for (const SampleSet* s : {&pred.samples, &baseline}) {
            for (std::size_t i = 0; i < s->size(); ++i) {
              lo = std::min(lo, s->at(i, j));
              hi = std::max(hi, s->at(i, j));
            }
          }
          const double pad = hi > lo ? 0.1 * (hi - lo) : 1.0;
          lo -= pad;
          hi += pad;
          DensityGrid grid;
          grid.id = id;
          grid.station = z.roi[j];
          for (std::size_t p = 0; p < grid_points; ++p) {
            const double v =
                lo + (hi - lo) * static_cast<double>(p) / static_cast<double>(grid_points - 1);
            const std::vector<double> y(z.roi.size(), v);
            grid.y.push_back(v);
            grid.p_model.push_back(std::exp(kde_log_density(pred.samples, h_model, y)[j]));
            grid.p_baseline.push_back(std::exp(kde_log_density(baseline, h_base, y)[j]));
          }
          report.densities.push_back(std::move(grid));
        }
      } catch (const Error& e) {
        row.model_nll = row.baseline_nll = row.random_nll = kNaN;
        row.model_se = row.baseline_se = row.random_se = kNaN;
        row.error = e.what();
      }
      report.rows.push_back(std::move(row));
    }
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const EvalRow& a, const EvalRow& b) { return a.id < b.id; });
  std::stable_sort(report.densities.begin(), report.densities.end(),
                   [](const DensityGrid& a, const DensityGrid& b) { return a.id < b.id; });
  return report;
}

void write_scores(const std::string& path, std::span<const ScoreRecord> scores) {
  auto out = open_out(path);
  out << "id,observable,severity,selected\n";
  for (const auto& s : scores) {
    out << s.id << ',' << format_real(s.observable) << ',' << format_real(s.severity) << ','
        << (s.selected ? 1 : 0) << '\n';
  }
}

void write_metrics(const std::string& path, const EvalReport& report) {
  auto out = open_out(path);
  out << "id,fold,model_nll,baseline_nll,random_nll,model_se,baseline_se,random_se,error\n";
  for (const auto& r : report.rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.id << ',' << r.fold << ',' << format_real(r.model_nll) << ','
        << format_real(r.baseline_nll) << ',' << format_real(r.random_nll) << ','
        << format_real(r.model_se) << ',' << format_real(r.baseline_se) << ','
        << format_real(r.random_se) << ',' << err << '\n';
  }
}

void write_densities(const std::string& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  for (const auto& grid : report.densities) {
    const auto path = std::filesystem::path(dir) /
                      ("density_" + std::to_string(grid.id) + "_" + std::to_string(grid.station) +
                       ".csv");
    auto out = open_out(path.string());
    out << "y,p_model,p_baseline\n";
    for (std::size_t p = 0; p < grid.y.size(); ++p) {
      out << format_real(grid.y[p]) << ',' << format_real(grid.p_model[p]) << ','
          << format_real(grid.p_baseline[p]) << '\n';
    }
  }
}

}  // namespace distreg
