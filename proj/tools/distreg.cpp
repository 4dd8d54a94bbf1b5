#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>

#include "distreg/config.hpp"
#include "distreg/data_io.hpp"
#include "distreg/error.hpp"
#include "distreg/evaluation.hpp"
#include "distreg/pipeline.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace distreg;

namespace {

struct Options {
  std::string scenario;
  std::string data;
  std::string config;
  std::string out;
  std::string model;
  std::string disruption;
  std::string suite = "all";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> id;
  std::size_t top = 20;
  std::size_t folds = 10;
  std::size_t samples = 0;
};

std::string num(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidArgument("cannot write " + path.string());
  }
  return out;
}

InterferenceConfig config_for(const Options& o) {
  InterferenceConfig cfg = o.config.empty() ? InterferenceConfig{} : load_config(o.config);
  if (o.seed) {
    cfg.seed = *o.seed;
  }
  if (o.samples > 0) {
    cfg.samples = o.samples;
  }
  cfg.validate();
  return cfg;
}

struct Loaded {
  Dataset data;
  std::vector<DayCounts> days;
  std::vector<PerturbedObservation> observations;
};

Loaded load(const Options& o, const InterferenceConfig& cfg) {
  Loaded l{load_dataset(o.data, cfg.window), {}, {}};
  l.days = l.data.day_counts(cfg.window);
  l.observations = l.data.observations(l.days);
  return l;
}

std::vector<std::size_t> selected_ids(const std::vector<ScoreRecord>& scores) {
  std::vector<std::size_t> ids;
  for (const auto& s : scores) {
    if (s.selected) {
      ids.push_back(s.id);
    }
  }
  return ids;
}

Disruption parse_disruption(const std::string& spec) {
  std::istringstream in(spec);
  std::vector<std::string> parts;
  for (std::string p; std::getline(in, p, ',');) {
    parts.push_back(p);
  }
  if (parts.size() != 4) {
    throw InvalidArgument("--disruption expects day,t_start,t_end,roi (roi as a;b;c)");
  }
  Disruption z;
  try {
    z.day = std::stoi(parts[0]);
    z.t_start = std::stoi(parts[1]);
    z.t_end = std::stoi(parts[2]);
    std::istringstream roi(parts[3]);
    for (std::string v; std::getline(roi, v, ';');) {
      z.roi.push_back(static_cast<NodeId>(std::stoul(v)));
    }
  } catch (const std::exception&) {
    throw InvalidArgument("--disruption: cannot parse '" + spec + "'");
  }
  return z;
}

int cmd_simulate(const Options& o) {
  SyntheticScenario s = load_scenario(o.scenario);
  if (o.seed) {
    s.seed = *o.seed;
  }
  const Dataset data = generate_synthetic(s);
  write_dataset(o.out, data);
  auto out = open_out(fs::path(o.out) / "scenario.txt");
  out << format_scenario(s);
  std::cout << "wrote " << data.journeys.size() << " days, " << data.disruptions.size()
            << " disruptions to " << o.out << '\n';
  return 0;
}

int cmd_score(const Options& o) {
  const InterferenceConfig cfg = config_for(o);
  const Loaded l = load(o, cfg);
  const auto scores = score_disruptions(l.days, l.data.disruptions, l.data.graph, cfg, o.top);
  write_scores(o.out, scores);
  std::cout << "scored " << scores.size() << " disruptions, selected "
            << selected_ids(scores).size() << '\n';
  return 0;
}

int cmd_train(const Options& o) {
  const InterferenceConfig cfg = config_for(o);
  const Loaded l = load(o, cfg);
  const auto scores = score_disruptions(l.days, l.data.disruptions, l.data.graph, cfg, o.top);
  std::vector<PerturbedObservation> obs;
  for (std::size_t id : selected_ids(scores)) {
    obs.push_back(l.observations[id]);
  }
  KernelConfig kernel = cfg.rho_mode == RhoMode::cv
                            ? cross_validated_kernel(l.days, obs, l.data.graph, cfg)
                            : resolve_kernel(l.days, obs, l.data.graph, cfg);
  const InterferenceModel model = train(l.days, obs, l.data.graph, cfg, kernel);
  fs::create_directories(o.out);
  write_model((fs::path(o.out) / "model.txt").string(), model);
  std::cout << "trained on " << obs.size() << " disruptions, rho " << num(kernel.rho()) << '\n';
  return 0;
}

int cmd_predict(const Options& o) {
  const InterferenceConfig cfg = config_for(o);
  const Loaded l = load(o, cfg);
  const InterferenceModel model = load_model(o.model);
  Disruption z;
  if (o.id) {
    if (*o.id >= l.data.disruptions.size()) {
      throw InvalidArgument("--id out of range");
    }
    z = l.data.disruptions[*o.id];
  } else if (!o.disruption.empty()) {
    z = parse_disruption(o.disruption);
  } else {
    throw InvalidArgument("predict needs --id or --disruption");
  }
  const Prediction pred = predict(model, l.days, z, l.data.graph, cfg, cfg.samples, cfg.seed);
  fs::create_directories(o.out);
  {
    auto out = open_out(fs::path(o.out) / "theta.csv");
    out << "component,theta\n";
    for (std::size_t i = 0; i < pred.mixture.basis.size(); ++i) {
      out << pred.mixture.basis.labels()[i] << ','
          << num(pred.mixture.theta[static_cast<Eigen::Index>(i)]) << '\n';
    }
  }
  {
    auto out = open_out(fs::path(o.out) / "fit.txt");
    out << "fit_residual = " << num(pred.mixture.fit_residual) << '\n'
        << "theta_sum = " << num(pred.mixture.theta.sum()) << '\n';
  }
  {
    auto out = open_out(fs::path(o.out) / "samples.csv");
    for (std::size_t j = 0; j < z.roi.size(); ++j) {
      out << (j ? "," : "") << "s" << z.roi[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < pred.samples.size(); ++i) {
      for (std::size_t j = 0; j < z.roi.size(); ++j) {
        out << (j ? "," : "") << num(pred.samples.at(i, j));
      }
      out << '\n';
    }
  }
  std::cout << "fit residual " << num(pred.mixture.fit_residual) << '\n';
  return 0;
}

int cmd_evaluate(const Options& o) {
  const InterferenceConfig cfg = config_for(o);
  const Loaded l = load(o, cfg);
  const auto scores = score_disruptions(l.days, l.data.disruptions, l.data.graph, cfg, o.top);
  const auto ids = selected_ids(scores);
  const EvalReport report =
      run_evaluation(l.days, l.observations, l.data.graph, cfg, ids, o.folds);
  const fs::path root(o.out);
  fs::create_directories(root);
  write_scores((root / "scores.csv").string(), scores);
  write_metrics((root / "metrics.csv").string(), report);
  write_densities((root / "densities").string(), report);
  {
    auto out = open_out(root / "summary.txt");
    out << "disruptions = " << report.rows.size() << '\n'
        << "failures = " << report.failures() << '\n'
        << "model_beats_random_nll = " << num(report.model_beats_random_nll()) << '\n'
        << "model_beats_baseline_se = " << num(report.model_beats_baseline_se()) << '\n';
  }
  std::cout << "evaluated " << report.rows.size() << " disruptions (" << report.failures()
            << " failed); model beats random NLL on " << num(report.model_beats_random_nll())
            << ", baseline SE on " << num(report.model_beats_baseline_se()) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution regression for network interference"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim->add_option("--scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", o.out, "Output directory")->required();
  sim->add_option("--seed", o.seed, "Override the scenario seed");

  auto* score = app.add_subcommand("score", "Observable and severity scores");
  score->add_option("--data", o.data, "Dataset directory")->required();
  score->add_option("--out", o.out, "scores.csv path")->required();
  score->add_option("--top", o.top, "Number of disruptions to select");
  score->add_option("--config", o.config, "Config file")->check(CLI::ExistingFile);

  auto* tr = app.add_subcommand("train", "Fit the mixture-of-embeddings model");
  auto* pr = app.add_subcommand("predict", "Predict a disruption and draw samples");
  auto* ev = app.add_subcommand("evaluate", "k-fold comparison against baseline and random");
  for (auto* sub : {tr, pr, ev}) {
    sub->add_option("--data", o.data, "Dataset directory")->required();
    sub->add_option("--config", o.config, "Config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory")->required();
    sub->add_option("--seed", o.seed, "Override the config seed");
  }
  tr->add_option("--top", o.top, "Train on the top-scoring disruptions");
  ev->add_option("--top", o.top, "Number of disruptions to select");
  ev->add_option("--folds", o.folds, "Number of folds");
  pr->add_option("--model", o.model, "model.txt from train")->required()->check(CLI::ExistingFile);
  pr->add_option("--id", o.id, "Disruption index in disruptions.csv");
  pr->add_option("--disruption", o.disruption, "day,t_start,t_end,roi");
  pr->add_option("--samples", o.samples, "Number of samples");

  auto* orc = app.add_subcommand("oracle", "Brute-force self checks");
  orc->add_option("--suite", o.suite, "gram, qp, bfs or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      return cmd_simulate(o);
    }
    if (*score) {
      return cmd_score(o);
    }
    if (*tr) {
      return cmd_train(o);
    }
    if (*pr) {
      return cmd_predict(o);
    }
    if (*ev) {
      return cmd_evaluate(o);
    }
    return cli::run_oracle(o.suite, std::cout) ? 0 : 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
