#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "distreg/data_io.hpp"
#include "distreg/error.hpp"
#include "distreg/evaluation.hpp"
#include "support.hpp"

using namespace distreg;

TEST(Scores, HandExamples) {
  const std::vector<double> observed = {3.0, 4.0};
  const std::vector<double> natural = {4.0, 4.0};
  // ||(4,4) - (3,4)||^2 / ||(4,4)||^2 = 1 / 32.
  EXPECT_DOUBLE_EQ(severity_score(observed, natural), 1.0 / 32.0);
  const std::vector<double> half = {2.0, 2.0};
  EXPECT_DOUBLE_EQ(severity_score(half, natural), 0.25);
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_THROW(severity_score(half, zero), InvalidArgument);

  const SampleSet x1(1, {2.0, 2.0});
  const SampleSet x2(1, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(observable_score(x1, x2), 0.25);
  EXPECT_DOUBLE_EQ(observable_score(SampleSet(1, {1.0, 1.0}), SampleSet(1, {0.5, 0.5})), 0.25);
  EXPECT_DOUBLE_EQ(observable_score(SampleSet(2, {1.0, 1.0}), SampleSet(2, {0.0, 1.0})), 0.5);
  EXPECT_THROW(observable_score(SampleSet(1, {0.0}), SampleSet(1, {1.0})), InvalidArgument);
  EXPECT_THROW(observable_score(SampleSet(1, {1.0}), SampleSet(1, {1.0, 2.0})), InvalidArgument);
}

TEST(Scores, SeverityFromCounts) {
  const std::vector<JourneyRecord> j = {{0, 1, 5, 10}, {0, 1, 5, 10}, {0, 2, 5, 20}};
  const DayCounts dc = aggregate_day(0, j, 3);
  const std::vector<double> natural = {4.0, 2.0};
  // Observed (2, 1): ||(2, 1)||^2 / ||(4, 2)||^2 = 0.25.
  EXPECT_DOUBLE_EQ(severity_score(dc, natural, Disruption{0, 0, 30, {1, 2}}), 0.25);
}

TEST(SelectTop, TiesByIndex) {
  const std::vector<double> s = {0.1, 0.5, 0.5, 0.3, 0.5};
  EXPECT_EQ(select_top(s, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(select_top(s, 4), (std::vector<std::size_t>{1, 2, 3, 4}));
  EXPECT_THROW(select_top(s, 10), InvalidArgument);
  EXPECT_TRUE(select_top(s, 0).empty());
}

TEST(Kfold, PartitionAndSizes) {
  std::vector<std::size_t> ids(23);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ids[i] = 100 + i;
  }
  const auto folds = kfold(ids, 5, 3);
  ASSERT_EQ(folds.size(), 5u);
  std::multiset<std::size_t> seen;
  for (std::size_t f = 0; f < 5; ++f) {
    EXPECT_EQ(folds[f].test.size(), f < 3 ? 5u : 4u);
    EXPECT_EQ(folds[f].train.size() + folds[f].test.size(), ids.size());
    const std::set<std::size_t> train(folds[f].train.begin(), folds[f].train.end());
    for (std::size_t id : folds[f].test) {
      EXPECT_FALSE(train.contains(id));
      seen.insert(id);
    }
  }
  EXPECT_EQ(seen, std::multiset<std::size_t>(ids.begin(), ids.end()));
  EXPECT_EQ(kfold(ids, 5, 3)[2].test, folds[2].test);
  EXPECT_NE(kfold(ids, 5, 4)[0].test, folds[0].test);
  EXPECT_THROW(kfold(ids, 0, 3), InvalidArgument);
  EXPECT_EQ(kfold(ids, 1, 3)[0].test.size(), ids.size());
  EXPECT_THROW(kfold(ids, 24, 3), InvalidArgument);
}

TEST(Kde, PeakAndNormalization) {
  const SampleSet one(1, {2.0});
  const double h = 0.8;
  const std::vector<double> at = {2.0};
  EXPECT_NEAR(kde_log_density(one, h, at)[0], 0.5 * std::log(h / std::numbers::pi), 1e-15);

  const SampleSet s = distreg::testing::gaussian(4, 50, {0.0});
  double mass = 0.0;
  const double dx = 0.01;
  for (double x = -12.0; x <= 12.0; x += dx) {
    const std::vector<double> y = {x};
    mass += std::exp(kde_log_density(s, 0.5, y)[0]) * dx;
  }
  EXPECT_NEAR(mass, 1.0, 1e-3);
}

TEST(Kde, FarTailStaysFinite) {
  const SampleSet s(1, {0.0, 1.0});
  const std::vector<double> y = {1e4};
  const double v = kde_log_density(s, 1.0, y)[0];
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 0.5 * std::log(1.0 / std::numbers::pi) - std::log(2.0) - (1e4 - 1) * (1e4 - 1),
              1e-6);
}

TEST(Silverman, Bandwidth) {
  const SampleSet wide = distreg::testing::gaussian(5, 1000, {0.0}, 10.0);
  const double sigma = 0.9 * 10.0 * std::pow(1000.0, -0.2);
  EXPECT_NEAR(silverman_h(wide)[0], 1.0 / (2.0 * sigma * sigma), 0.1 / (2.0 * sigma * sigma));
  // A constant column falls back to the floor.
  EXPECT_DOUBLE_EQ(silverman_h(SampleSet(1, {3.0, 3.0, 3.0}))[0], 2.0);
}

TEST(Nll, SumsCoordinates) {
  const SampleSet s(2, {0.0, 0.0});
  const std::vector<double> h = {1.0, 1.0};
  const std::vector<double> y = {0.0, 1.0};
  const NllResult r = nll(s, y, h);
  EXPECT_NEAR(r.nll, std::log(std::numbers::pi) + 1.0, 1e-14);
  EXPECT_TRUE(r.log_defined);
  EXPECT_NEAR(r.log_nll, std::log(r.nll), 1e-15);
}

TEST(SquaredError, Example) {
  const std::vector<double> mean = {0.0, 0.0};
  const std::vector<double> observed = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(squared_error(mean, observed), 1.0);
  EXPECT_DOUBLE_EQ(squared_error(SampleSet(2, {3.0, 4.0, 3.0, 4.0}), observed), 0.0);
}

TEST(RandomTheta, DirichletMean) {
  const std::size_t n = 4;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Eigen::VectorXd t = random_theta(n, seed);
    ASSERT_NEAR(t.sum(), 1.0, 1e-12);
    ASSERT_GE(t.minCoeff(), 0.0);
    acc += t;
  }
  acc /= 10000.0;
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(acc[static_cast<Eigen::Index>(i)], 0.25, 0.01);
  }
  EXPECT_EQ(random_theta(n, 17), random_theta(n, 17));
}

TEST(MixtureMean, Weighted) {
  const KernelConfig k(KernelFamily::gaussian, 1.0);
  const Basis b(k, {SampleSet(1, {0.0, 2.0}), SampleSet(1, {10.0})}, {"a", "b"});
  Eigen::VectorXd t(2);
  t << 0.5, 0.5;
  EXPECT_EQ(mixture_mean(b, t), (std::vector<double>{5.5}));
}

namespace {

Dataset small_dataset() {
  SyntheticScenario s;
  s.nodes = 12;
  s.days = 16;
  s.disruptions = 6;
  s.rate = 8.0;
  s.decay = 1.0;
  s.seed = 3;
  return generate_synthetic(s);
}

}  // namespace

TEST(ScoreDisruptions, MarksSelected) {
  const Dataset data = small_dataset();
  const auto days = data.day_counts();
  InterferenceConfig cfg;
  const auto scores = score_disruptions(days, data.disruptions, data.graph, cfg, 3);
  ASSERT_EQ(scores.size(), data.disruptions.size());
  std::size_t selected = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    EXPECT_EQ(scores[i].id, i);
    EXPECT_TRUE(scores[i].error.empty()) << scores[i].error;
    EXPECT_GE(scores[i].observable, 0.0);
    selected += scores[i].selected;
  }
  EXPECT_EQ(selected, 3u);
}

TEST(RunEvaluation, FoldsAreDisjointAndRowsComplete) {
  const Dataset data = small_dataset();
  const auto days = data.day_counts();
  const auto obs = data.observations(days);
  InterferenceConfig cfg;
  cfg.samples = 200;
  const std::vector<std::size_t> selected = {0, 1, 2, 3, 4, 5};
  const EvalReport r = run_evaluation(days, obs, data.graph, cfg, selected, 3, 11);
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.failures(), 0u);
  for (const auto& f : r.folds) {
    for (std::size_t id : f.test) {
      EXPECT_EQ(std::count(f.train.begin(), f.train.end(), id), 0);
    }
  }
  for (const auto& row : r.rows) {
    EXPECT_TRUE(std::isfinite(row.model_se));
    EXPECT_TRUE(std::isfinite(row.baseline_nll));
    EXPECT_GT(row.rho, 0.0);
  }
  EXPECT_FALSE(r.densities.empty());
  EXPECT_EQ(r.densities.front().y.size(), 11u);
  const EvalReport again = run_evaluation(days, obs, data.graph, cfg, selected, 3, 11);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(again.rows[i].model_nll, r.rows[i].model_nll);
    EXPECT_EQ(again.rows[i].random_se, r.rows[i].random_se);
  }
}
