// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "distreg/data_io.hpp"
#include "distreg/evaluation.hpp"
#include "distreg/pipeline.hpp"
#include "distreg/regression.hpp"
#include "distreg/sampler.hpp"
#include "distreg/simplex_qp.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace distreg;
using distreg::testing::gaussian;
using distreg::testing::gaussian_mixture_1d;
using distreg::testing::median;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr int kSeeds = 20;

// 1. Mixture of distributions: P = 0.3 N(0,1) + 0.7 N(5,1), I = 2 known components.
Outcome mixture_of_distributions() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 5000;
  std::vector<double> errs;
  for (int s = 0; s < kSeeds; ++s) {
    const SampleSet p = gaussian_mixture_1d(100 + s, n, {0.3, 0.7}, {0.0, 5.0});
    const SampleSet q1 = gaussian(200 + s, n, {0.0});
    const SampleSet q2 = gaussian(300 + s, n, {5.0});
    const KernelConfig k(KernelFamily::gaussian, median_heuristic(p));
    const auto model = fit_mixture_distributions(
        TrainingPairs({{embed(k, q1), embed(k, q2)}}, {embed(k, p)}));
    errs.push_back(std::max(std::fabs(model.w[0] - 0.3), std::fabs(model.w[1] - 0.7)));
  }
  const double med = median(errs);
  const double secs = seconds_since(t0);
  return {med <= 0.05 && secs < 30.0,
          fmt("median ||w - (0.3,0.7)||_inf = %.4f (tol 0.05)", med) +
              fmt(", %.1f s (limit 30 s)", secs)};
}

// 2. One-parameter model with identity ground truth.
Outcome one_parameter_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const KernelConfig k(KernelFamily::gaussian, 0.5);
  const std::size_t pairs = 5;
  std::vector<double> medians;
  for (std::size_t n : {100, 400, 1600}) {
    std::vector<double> errs;
    for (int s = 0; s < kSeeds; ++s) {
      std::vector<Embedding> in;
      std::vector<Embedding> out;
      for (std::size_t c = 0; c < pairs; ++c) {
        const double m = static_cast<double>(c);
        in.push_back(embed(k, gaussian(10000 * s + 10 * c + 1, n, {m})));
        out.push_back(embed(k, gaussian(10000 * s + 10 * c + 2, n, {m})));
      }
      errs.push_back(std::fabs(
          fit_one_parameter(TrainingPairs::single_input(std::move(in), std::move(out))).alpha -
          1.0));
    }
    medians.push_back(median(errs));
  }
  const double secs = seconds_since(t0);
  const bool pass = medians[0] > medians[1] && medians[1] > medians[2] && medians[2] <= 0.05 &&
                    secs < 30.0;
  return {pass, fmt("median |alpha - 1| at n=100,400,1600: %.4f", medians[0]) +
                    fmt(", %.4f", medians[1]) + fmt(", %.4f (strictly decreasing, last <= 0.05)",
                                                    medians[2]) +
                    fmt(", %.1f s (limit 30 s)", secs)};
}

// 3. Mixture of embeddings on the even two-Gaussian synthetic.
Outcome mixture_of_embeddings() {
  const std::size_t n = 5000;
  std::vector<double> errs;
  for (int s = 0; s < kSeeds; ++s) {
    const SampleSet p = gaussian_mixture_1d(400 + s, n, {0.5, 0.5}, {0.0, 5.0});
    const SampleSet q1 = gaussian(500 + s, n, {0.0});
    const SampleSet q2 = gaussian(600 + s, n, {5.0});
    const KernelConfig k(KernelFamily::gaussian, median_heuristic(p));
    const auto model = fit_mixture_embeddings(
        TrainingPairs({{embed(k, q1), embed(k, q2)}}, {embed(k, p)}));
    errs.push_back(
        std::max(std::fabs(model.alpha[0] - 0.5), std::fabs(model.alpha[1] - 0.5)));
  }
  const double med = median(errs);
  return {med <= 0.05, fmt("median ||alpha - (0.5,0.5)||_inf = %.4f (tol 0.05)", med)};
}

// 4. Sampling-scheme consistency with the target inside the basis span.
Outcome sampling_consistency() {
  const KernelConfig k(KernelFamily::gaussian, 0.5);
  const Basis basis(k,
                    {gaussian(41, 300, {0.0, 0.0}), gaussian(42, 300, {3.0, 0.0}),
                     gaussian(43, 300, {0.0, 3.0})},
                    {});
  const Eigen::Vector3d theta_true(0.2, 0.5, 0.3);
  const std::vector<std::size_t> sizes = {200, 800, 3200};
  std::vector<std::vector<double>> gaps(sizes.size());
  for (int s = 0; s < kSeeds; ++s) {
    const SampleSet target = sample_mixture(basis, theta_true, 4000, 7000 + s);
    const FittedMixture fit = fit_mixture_weights(embed(k, target), basis);
    std::vector<KernelExpansion> tests;
    const CounterRng rng(8000 + s, 4);
    std::uint64_t c = 0;
    for (int f = 0; f < 5; ++f) {
      std::vector<double> pts(20);
      std::vector<double> coeffs(10);
      for (double& v : pts) {
        v = -2.0 + 7.0 * rng.uniform(c++);
      }
      for (double& v : coeffs) {
        v = 2.0 * rng.uniform(c++) - 1.0;
      }
      KernelExpansion e{k, SampleSet(2, pts), coeffs};
      const double norm = e.rkhs_norm();
      for (double& v : e.coeffs) {
        v /= norm;
      }
      tests.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const SampleSet draws = sample_mixture(fit, sizes[i], 9000 + 97 * s + i);
      double gap = 0.0;
      for (const auto& f : tests) {
        gap += expectation_gap(f, draws, target);
      }
      gaps[i].push_back(gap / static_cast<double>(tests.size()));
    }
  }
  const double m0 = median(gaps[0]);
  const double m1 = median(gaps[1]);
  const double m2 = median(gaps[2]);
  return {m0 >= m1 && m1 >= m2 && m2 <= 0.02,
          fmt("median gap at n=200,800,3200: %.4f", m0) + fmt(", %.4f", m1) +
              fmt(", %.4f (non-increasing, last <= 0.02)", m2)};
}

// 5. Non-parametric operator interpolation and projected-error trend.
Outcome nonparametric_interpolation() {
  const KernelConfig k(KernelFamily::gaussian, 0.5);
  std::vector<Embedding> in;
  std::vector<Embedding> out;
  for (int c = 0; c < 3; ++c) {
    in.push_back(embed(k, gaussian(50 + c, 200, {5.0 * c})));
    out.push_back(embed(k, gaussian(60 + c, 200, {5.0 * c + 1.0}, 0.5)));
  }
  const auto op = fit_nonparametric(TrainingPairs::single_input(in, out), 0.0);
  double worst = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    worst = std::max(worst, rkhs_norm(difference(apply_nonparametric(op, in[c]), out[c])));
  }

  std::vector<double> trend;
  for (std::size_t n : {50, 200, 800}) {
    std::vector<double> errs;
    for (int s = 0; s < 10; ++s) {
      std::vector<Embedding> qi;
      std::vector<Embedding> pi;
      for (int c = 0; c < 3; ++c) {
        qi.push_back(embed(k, gaussian(1000 * s + 10 * c + 1, n, {2.0 * c})));
        pi.push_back(embed(k, gaussian(1000 * s + 10 * c + 2, n, {2.0 * c})));
      }
      errs.push_back(projected_operator_error(TrainingPairs::single_input(qi, pi)));
    }
    trend.push_back(median(errs));
  }
  const bool pass = worst <= 1e-8 && trend[0] > trend[1] && trend[1] > trend[2];
  return {pass, fmt("max RKHS residual %.3g (tol 1e-8)", worst) +
                    fmt("; projected error at n=50,200,800: %.4f", trend[0]) +
                    fmt(", %.4f", trend[1]) + fmt(", %.4f (decreasing)", trend[2])};
}

// 6. QP oracle equivalence against a 0.01 grid.
Outcome qp_oracle() {
  double worst_gap = -1.0;
  double worst_kkt = 0.0;
  int bad = 0;
  for (int n : {2, 3}) {
    const int count = n == 2 ? 100 : 20;
    for (int s = 0; s < count; ++s) {
      const CounterRng rng(31 * n + 1000 * s, 6);
      std::uint64_t c = 0;
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (int i = 0; i < n * n; ++i) {
        a.data()[i] = 2.0 * rng.uniform(c++) - 1.0;
      }
      for (int i = 0; i < n; ++i) {
        b[i] = 2.0 * rng.uniform(c++) - 1.0;
      }
      const SimplexQPProblem p{a * a.transpose(), b};
      const SimplexQPSolution sol = solve(p);
      double grid = std::numeric_limits<double>::infinity();
      Eigen::VectorXd t(n);
      for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= (n == 3 ? 100 - i : 0); ++j) {
          if (n == 2) {
            t << i / 100.0, (100 - i) / 100.0;
          } else {
            t << i / 100.0, j / 100.0, (100 - i - j) / 100.0;
          }
          grid = std::min(grid, simplex_qp_objective(p, t));
        }
      }
      const double gap = sol.objective - grid;
      worst_gap = std::max(worst_gap, gap);
      worst_kkt = std::max(worst_kkt, sol.kkt_residual);
      bad += gap <= 1e-6 && sol.kkt_residual <= 1e-8 ? 0 : 1;
    }
  }
  return {bad == 0, std::to_string(bad) + " of 120 instances off" +
                        fmt("; worst objective - grid min %.3g (tol 1e-6)", worst_gap) +
                        fmt(", worst KKT %.3g (tol 1e-8)", worst_kkt)};
}

bool partition_ok(const std::vector<Fold>& folds, std::vector<std::size_t> ids) {
  std::vector<std::size_t> seen;
  for (const auto& f : folds) {
    for (std::size_t id : f.test) {
      if (std::find(f.train.begin(), f.train.end(), id) != f.train.end()) {
        return false;
      }
      seen.push_back(id);
    }
    if (f.train.size() + f.test.size() != ids.size()) {
      return false;
    }
  }
  std::sort(seen.begin(), seen.end());
  std::sort(ids.begin(), ids.end());
  return seen == ids;
}

// 7. Structural invariants of the pipeline.
Outcome pipeline_invariants(const std::string& schema_dir) {
  std::size_t checked_rows = 0;
  std::size_t violations = 0;
  std::size_t predicts = 0;
  std::size_t infeasible_theta = 0;
  auto check_dataset = [&](const Dataset& data, const InterferenceConfig& cfg) {
    const auto days = data.day_counts(cfg.window);
    for (const auto& z : data.disruptions) {
      const auto sets = input_variable_samples(days, z, data.graph, cfg);
      for (std::size_t i = 0; i < sets[0].data().size(); ++i) {
        ++checked_rows;
        violations += sets[0].data()[i] + sets[1].data()[i] == sets[2].data()[i] ? 0 : 1;
      }
    }
  };

  SyntheticScenario s;
  s.nodes = 12;
  s.days = 12;
  s.disruptions = 6;
  s.rate = 6.0;
  s.decay = 1.0;
  InterferenceConfig cfg;
  for (auto topo : {Topology::path, Topology::cycle, Topology::grid, Topology::erdos_renyi}) {
    s.topology = topo;
    s.edge_probability = 0.3;
    check_dataset(generate_synthetic(s), cfg);
  }
  check_dataset(load_dataset(schema_dir, cfg.window), cfg);

  bool folds_ok = true;
  for (std::size_t count : {5, 12, 20}) {
    std::vector<std::size_t> ids(count);
    for (std::size_t i = 0; i < count; ++i) {
      ids[i] = 3 * i + 1;
    }
    for (std::size_t kf : {2, 5}) {
      folds_ok = folds_ok && partition_ok(kfold(ids, kf, 17), ids);
    }
  }

  s.topology = Topology::grid;
  s.nodes = 16;
  s.days = 14;
  s.disruptions = 8;
  const Dataset data = generate_synthetic(s);
  const auto days = data.day_counts();
  const auto obs = data.observations(days);
  std::vector<std::size_t> all(obs.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = i;
  }
  const EvalReport report = run_evaluation(days, obs, data.graph, cfg, all, 4, 11);
  bool oos = partition_ok(report.folds, all) && report.rows.size() == all.size();
  for (const auto& row : report.rows) {
    const auto& train = report.folds[row.fold].train;
    oos = oos && std::find(train.begin(), train.end(), row.id) == train.end();
  }
  for (const Fold& f : report.folds) {
    std::vector<PerturbedObservation> tr;
    for (std::size_t id : f.train) {
      tr.push_back(obs[id]);
    }
    const auto model = train(days, tr, data.graph, cfg, resolve_kernel(days, tr, data.graph, cfg));
    for (std::size_t id : f.test) {
      const Prediction p = predict(model, days, obs[id].disruption, data.graph, cfg, 50, id);
      ++predicts;
      const bool feasible = (p.mixture.theta.array() >= 0.0).all() &&
                            std::fabs(p.mixture.theta.sum() - 1.0) <= 1e-12;
      infeasible_theta += feasible ? 0 : 1;
    }
  }

  const bool pass = violations == 0 && checked_rows > 0 && folds_ok && oos &&
                    infeasible_theta == 0 && predicts == all.size();
  return {pass, "X1+X2=X3 on " + std::to_string(checked_rows) + " rows, " +
                    std::to_string(violations) + " violations; kfold partitions " +
                    (folds_ok ? "valid" : "INVALID") + "; out-of-sample " +
                    (oos ? "held" : "VIOLATED") + "; theta on simplex in " +
                    std::to_string(predicts - infeasible_theta) + "/" +
                    std::to_string(predicts) + " predictions"};
}

SyntheticScenario end_to_end_scenario() {
  SyntheticScenario s;
  s.topology = Topology::grid;
  s.nodes = 30;
  s.days = 30;
  s.disruptions = 12;
  s.phi = 0.8;
  s.rate = 20.0;
  s.decay = 2.0;
  s.seed = 1;
  return s;
}

// 8. End-to-end synthetic comparison against random and baseline models.
Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = generate_synthetic(end_to_end_scenario());
  InterferenceConfig cfg;
  cfg.rho_mode = RhoMode::cv;
  const auto days = data.day_counts(cfg.window);
  const auto obs = data.observations(days);
  const auto scores = score_disruptions(days, data.disruptions, data.graph, cfg, obs.size());
  std::vector<std::size_t> selected;
  for (const auto& r : scores) {
    if (r.selected) {
      selected.push_back(r.id);
    }
  }
  const EvalReport report = run_evaluation(days, obs, data.graph, cfg, selected, 10);
  const double nll_share = report.model_beats_random_nll();
  const double se_share = report.model_beats_baseline_se();
  const double secs = seconds_since(t0);
  const bool pass = report.failures() == 0 && report.rows.size() == 12 && nll_share >= 0.6 &&
                    se_share >= 0.5 && secs < 300.0;
  return {pass, fmt("model NLL < random on %.0f%% (need 60%%)", 100.0 * nll_share) +
                    fmt(", model SE < baseline on %.0f%% (need 50%%)", 100.0 * se_share) +
                    ", " + std::to_string(report.failures()) + " failed disruptions" +
                    fmt(", %.1f s (limit 300 s)", secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every regular file under a and b, compared byte for byte.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::vector<fs::path> la;
  std::vector<fs::path> lb;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) {
      la.push_back(fs::relative(e.path(), a));
    }
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) {
      lb.push_back(fs::relative(e.path(), b));
    }
  }
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  if (la != lb) {
    return false;
  }
  for (const auto& rel : la) {
    if (slurp(a / rel) != slurp(b / rel)) {
      return false;
    }
  }
  files += la.size();
  return true;
}

// 9. Byte-identical CLI outputs on repeated runs.
Outcome determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / ("distreg_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream sc(root / "scenario.txt");
    sc << "topology = grid\nnodes = 16\ndays = 14\ndisruptions = 8\nrate = 8\ndecay = 1\n";
    std::ofstream cf(root / "config.txt");
    cf << "kernel.rho = auto\nsamples = 200\n";
  }
  const std::string r = root.string();
  const std::vector<std::string> commands = {
      "simulate --scenario " + r + "/scenario.txt --seed 5 --out {}/data",
      "score --data " + r + "/run0/data --out {}/scores.csv --top 6",
      "train --data " + r + "/run0/data --config " + r + "/config.txt --out {}/train",
      "predict --data " + r + "/run0/data --config " + r + "/config.txt --model " + r +
          "/run0/train/model.txt --id 2 --out {}/predict",
      "evaluate --data " + r + "/run0/data --config " + r + "/config.txt --folds 4 --out {}/eval",
      "oracle --suite all > {}/oracle.txt",
  };
  bool ok = true;
  for (int run = 0; run < 2 && ok; ++run) {
    const std::string dir = r + "/run" + std::to_string(run);
    fs::create_directories(dir);
    for (const auto& c : commands) {
      std::string cmd = c;
      for (auto pos = cmd.find("{}"); pos != std::string::npos; pos = cmd.find("{}")) {
        cmd.replace(pos, 2, dir);
      }
      const std::string full = cli + " " + cmd + (cmd.find('>') == std::string::npos
                                                      ? " > /dev/null 2>&1"
                                                      : " 2>/dev/null");
      if (std::system(full.c_str()) != 0) {
        ok = false;
        std::cerr << "command failed: " << full << '\n';
        break;
      }
    }
  }
  std::size_t files = 0;
  const bool same = ok && same_tree(root / "run0", root / "run1", files);
  fs::remove_all(root);
  return {same, std::to_string(commands.size()) + " commands run twice, " +
                    std::to_string(files) + " output files " +
                    (same ? "byte-identical" : "DIFFER or commands failed")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli path> <schema fixture dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::string schema = argv[2];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mixture-of-distributions recovery", mixture_of_distributions},
      {"one-parameter consistency trend", one_parameter_trend},
      {"mixture-of-embeddings recovery", mixture_of_embeddings},
      {"sampling-scheme consistency", sampling_consistency},
      {"non-parametric operator interpolation", nonparametric_interpolation},
      {"QP oracle equivalence", qp_oracle},
      {"pipeline structural invariants", [&] { return pipeline_invariants(schema); }},
      {"end-to-end synthetic comparison", end_to_end},
      {"determinism", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
