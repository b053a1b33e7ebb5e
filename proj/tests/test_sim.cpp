#include <gtest/gtest.h>

#include <cmath>

#include "unisat/sim.hpp"

using namespace unisat;

TEST(GenerateScenario, BaseConfigExpectations) {
  const Scenario sc = generate_scenario(ScenarioKind::BaseConfig, 1);
  ASSERT_EQ(sc.prior.clusters.size(), 5u);
  double prior_e = 0.0;
  for (const auto& c : sc.prior.clusters) {
    prior_e += pmf_expectation(c.cardinality);
    EXPECT_TRUE(c.truth_cardinality.empty());  // prior matches truth
  }
  EXPECT_NEAR(prior_e, 5.95, 0.01);
}

TEST(GenerateScenario, OverestimateSplitsPriorAndTruth) {
  const Scenario sc = generate_scenario(ScenarioKind::Overestimate, 1);
  double prior_e = 0.0, truth_e = 0.0;
  for (const auto& c : sc.prior.clusters) {
    prior_e += pmf_expectation(c.cardinality);
    truth_e += pmf_expectation(c.truth_pmf());
  }
  EXPECT_NEAR(prior_e, 8.63, 0.01);
  EXPECT_NEAR(truth_e, 5.95, 0.01);
}

TEST(GenerateScenario, UnderestimateSplitsPriorAndTruth) {
  const Scenario sc = generate_scenario(ScenarioKind::Underestimate, 1);
  double prior_e = 0.0, truth_e = 0.0;
  for (const auto& c : sc.prior.clusters) {
    prior_e += pmf_expectation(c.cardinality);
    truth_e += pmf_expectation(c.truth_pmf());
  }
  EXPECT_NEAR(prior_e, 3.60, 0.01);
  EXPECT_NEAR(truth_e, 5.95, 0.01);
}

TEST(GenerateScenario, RandomRespectsQuotedRanges) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario sc = generate_scenario(ScenarioKind::Random, seed);
    ASSERT_GE(sc.prior.clusters.size(), 1u);
    ASSERT_LE(sc.prior.clusters.size(), 6u);
    for (const auto& c : sc.prior.clusters) {
      ASSERT_EQ(c.cardinality.size(), 4u);  // up to 3 targets per cluster
      double total = 0.0;
      for (double p : c.cardinality) total += p;
      EXPECT_NEAR(total, 1.0, 1e-12);
      const auto& gm = std::get<GaussianMixture2d>(c.spatial);
      const Vec2 mean = gm.components[0].mean;
      EXPECT_GE(mean.x(), sc.workspace.min_x + 100.0);
      EXPECT_LE(mean.x(), sc.workspace.max_x - 100.0);
      EXPECT_GE(mean.y(), sc.workspace.min_y + 100.0);
      EXPECT_LE(mean.y(), sc.workspace.max_y - 100.0);
      // Covariance must be positive definite.
      EXPECT_GT(gm.components[0].cov.determinant(), 0.0);
    }
  }
}

TEST(GenerateScenario, RandomDeterministicGivenSeed) {
  const Scenario a = generate_scenario(ScenarioKind::Random, 7);
  const Scenario b = generate_scenario(ScenarioKind::Random, 7);
  ASSERT_EQ(a.prior.clusters.size(), b.prior.clusters.size());
  for (std::size_t i = 0; i < a.prior.clusters.size(); ++i) {
    EXPECT_EQ(std::get<GaussianMixture2d>(a.prior.clusters[i].spatial).components[0].mean,
              std::get<GaussianMixture2d>(b.prior.clusters[i].spatial).components[0].mean);
  }
}

TEST(SpawnTruth, DegeneratePmfAndPointMass) {
  Scenario sc;
  Cluster c;
  GaussianMixture2d gm;
  gm.components.push_back(Gaussian2d{1.0, {77, 33}, Mat2::Identity() * 1e-12});
  c.spatial = gm;
  c.cardinality = {0.0, 0.0, 1.0};
  sc.prior.clusters.push_back(c);
  Rng rng(3);
  const WorldState w = spawn_truth(sc, rng);
  ASSERT_EQ(w.targets.size(), 2u);
  for (const auto& t : w.targets) {
    EXPECT_NEAR(t.state(0), 77.0, 1e-3);
    EXPECT_NEAR(t.state(1), 33.0, 1e-3);
  }
}

TEST(SpawnTruth, DeterministicGivenSeed) {
  const Scenario sc = generate_scenario(ScenarioKind::BaseConfig, 5);
  Rng a(9), b(9);
  const WorldState wa = spawn_truth(sc, a);
  const WorldState wb = spawn_truth(sc, b);
  ASSERT_EQ(wa.targets.size(), wb.targets.size());
  for (std::size_t i = 0; i < wa.targets.size(); ++i) {
    EXPECT_EQ(wa.targets[i].state, wb.targets[i].state);
  }
  EXPECT_EQ(wa.agent, wb.agent);
}

// Empirical per-cluster count pmf over many spawns stays within 3-sigma
// multinomial bands; counts are attributed to the nearest cluster center.
TEST(SpawnTruth, FrequencyMatchesTruthPmf) {
  const Scenario sc = generate_scenario(ScenarioKind::BaseConfig, 1);
  std::vector<Vec2> centers;
  for (const auto& c : sc.prior.clusters) {
    centers.push_back(std::get<GaussianMixture2d>(c.spatial).components[0].mean);
  }
  const int n_spawns = 10000;
  std::vector<std::vector<int>> counts(centers.size(), std::vector<int>(8, 0));
  Rng rng(11);
  for (int s = 0; s < n_spawns; ++s) {
    const WorldState w = spawn_truth(sc, rng);
    std::vector<int> per_cluster(centers.size(), 0);
    for (const auto& t : w.targets) {
      int best = 0;
      double best_d = 1e18;
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = (SensorModel::measure(t.state) - centers[c]).norm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      per_cluster[static_cast<std::size_t>(best)]++;
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      counts[c][static_cast<std::size_t>(std::min(per_cluster[c], 7))]++;
    }
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const auto& pmf = sc.prior.clusters[c].truth_pmf();
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      const double p = pmf[k];
      const double sigma = std::sqrt(p * (1.0 - p) / n_spawns);
      const double freq = static_cast<double>(counts[c][k]) / n_spawns;
      EXPECT_NEAR(freq, p, 3.0 * sigma + 0.003);  // small slack for attribution
    }
  }
}

TEST(StepTargets, NoiselessIsIdentity) {
  WorldState w;
  w.targets.push_back({0, Vec4(10, 20, 0, 0)});
  MotionModel m;
  m.position_noise_std = 0.0;
  m.velocity_noise_std = 0.0;
  Rng rng(1);
  const WorldState out = step_targets(w, m, {0, 0, 100, 100}, rng);
  EXPECT_EQ(out.targets[0].state.head<2>(), Vec2(10, 20));
  EXPECT_EQ(out.step, 1);
}

// Random-walk displacement variance accumulates linearly in steps.
TEST(StepTargets, DisplacementVarianceAccumulates) {
  const int n_targets = 2000;
  const int n_steps = 100;
  const double sigma = 1.0;
  WorldState w;
  const Rect huge{-1e6, -1e6, 1e6, 1e6};
  for (int i = 0; i < n_targets; ++i) w.targets.push_back({i, Vec4::Zero()});
  MotionModel m;
  m.position_noise_std = sigma;
  m.velocity_noise_std = 0.0;
  Rng rng(13);
  for (int k = 0; k < n_steps; ++k) w = step_targets(std::move(w), m, huge, rng);
  double var = 0.0;
  for (const auto& t : w.targets) var += t.state(0) * t.state(0) / n_targets;
  const double expected = n_steps * sigma * sigma;
  EXPECT_NEAR(var, expected, 0.1 * expected);
}

TEST(StepTargets, ReflectsAtBoundary) {
  WorldState w;
  w.targets.push_back({0, Vec4(99.5, 50, 0, 0)});
  MotionModel m;
  m.position_noise_std = 5.0;
  m.velocity_noise_std = 0.0;
  const Rect ws{0, 0, 100, 100};
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    w = step_targets(std::move(w), m, ws, rng);
    ASSERT_TRUE(ws.contains(SensorModel::measure(w.targets[0].state)));
  }
}

TEST(StepAgent, FollowsWaypoints) {
  WorldState w;
  w.agent = Vec2(50, 50);
  PlannerConfig cfg;
  cfg.horizon = 40;
  cfg.step_length = 10.0;
  const Rect ws{0, 0, 1000, 1000};
  const auto plans = enumerate_actions(w.agent, cfg, ws);
  const WorldState stay = step_agent(w, plans[0], 0);
  EXPECT_EQ(stay.agent, Vec2(50, 50));
  const WorldState east = step_agent(w, plans[1], 0);
  EXPECT_NEAR(east.agent.x(), 60.0, 1e-12);
  EXPECT_NEAR(east.agent.y(), 50.0, 1e-12);
  EXPECT_THROW(step_agent(w, plans[1], 40), WaypointExhausted);
}

TEST(StepAgent, ClampedPlanStaysOnBoundary) {
  WorldState w;
  w.agent = Vec2(995, 500);
  PlannerConfig cfg;
  const Rect ws{0, 0, 1000, 1000};
  const auto plans = enumerate_actions(w.agent, cfg, ws);
  WorldState out = w;
  for (int k = 0; k < cfg.horizon; ++k) {
    out = step_agent(std::move(out), plans[1], k);  // heading +x
    ASSERT_LE(out.agent.x(), 1000.0);
  }
  EXPECT_DOUBLE_EQ(out.agent.x(), 1000.0);
}

TEST(Sense, IdealSensorSingleMeasurement) {
  WorldState w;
  w.agent = Vec2(0, 0);
  w.targets.push_back({0, Vec4(10, 5, 0, 0)});
  SensorModel s;
  s.detection_plateau = 1.0;
  s.noise_cov = Mat2::Zero();
  s.clutter_rate = 0.0;
  Rng rng(19);
  const auto z = sense(w, s, rng);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_EQ(z[0], Vec2(10, 5));
}

TEST(Sense, NothingInRangeGivesEmptySet) {
  WorldState w;
  w.agent = Vec2(0, 0);
  w.targets.push_back({0, Vec4(500, 500, 0, 0)});
  SensorModel s;
  s.clutter_rate = 0.0;
  Rng rng(23);
  for (int k = 0; k < 100; ++k) EXPECT_TRUE(sense(w, s, rng).empty());
}

// Detection frequency over many scans matches the plateau value, and the
// mean measurement count matches P_D + lambda.
TEST(Sense, DetectionFrequencyMatchesPlateau) {
  WorldState w;
  w.agent = Vec2(0, 0);
  w.targets.push_back({0, Vec4(20, 0, 0, 0)});
  SensorModel s;  // plateau 0.8825, clutter 0.01
  Rng rng(29);
  const int n = 100000;
  long total = 0;
  for (int k = 0; k < n; ++k) total += static_cast<long>(sense(w, s, rng).size());
  const double mean_count = static_cast<double>(total) / n;
  EXPECT_NEAR(mean_count, 0.8825 + 0.01, 0.004);
}
