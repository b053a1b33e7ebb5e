#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "unisat/metrics.hpp"
#include "unisat/models.hpp"
#include "unisat/planner.hpp"
#include "unisat/prior.hpp"

namespace unisat {

enum class ScenarioKind { BaseConfig, Bimodal, HighVariance, Overestimate, Underestimate, Random };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::BaseConfig: return "base_config";
    case ScenarioKind::Bimodal: return "bimodal";
    case ScenarioKind::HighVariance: return "high_variance";
    case ScenarioKind::Overestimate: return "overestimate";
    case ScenarioKind::Underestimate: return "underestimate";
    case ScenarioKind::Random: return "random";
  }
  return "unknown";
}

// The full experiment configuration: everything an episode needs.
struct Scenario {
  Rect workspace{0.0, 0.0, 1216.0, 1230.0};
  int duration = 500;  // steps (1 step = 1 s)
  PopulationPrior prior;
  SensorModel sensor;
  MotionModel motion;
  PlannerConfig planner;
  FilterCaps filter_caps;
  MetricConfig metric;
  std::uint64_t seed = 0;
};

struct TruthTarget {
  int id = 0;
  Vec4 state = Vec4::Zero();
};

struct WorldState {
  std::vector<TruthTarget> targets;
  Vec2 agent = Vec2::Zero();
  int step = 0;
};

namespace detail {

// Exponentially tilts a pmf (p'(n) ~ p(n) g^n) so its expectation hits the
// target; solved by bisection on log g.
inline std::vector<double> tilt_pmf(const std::vector<double>& pmf, double target_expectation) {
  auto tilted = [&](double log_g) {
    std::vector<double> out(pmf.size());
    double total = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) {
      out[n] = pmf[n] * std::exp(log_g * static_cast<double>(n));
      total += out[n];
    }
    for (auto& p : out) p /= total;
    return out;
  };
  double lo = -30.0, hi = 30.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pmf_expectation(tilted(mid)) < target_expectation) lo = mid;
    else hi = mid;
  }
  return tilted(0.5 * (lo + hi));
}

inline Cluster gaussian_cluster(const Vec2& mean, double sigma, std::vector<double> pmf) {
  Cluster c;
  GaussianMixture2d gm;
  gm.components.push_back(Gaussian2d{1.0, mean, Mat2::Identity() * sigma * sigma});
  c.spatial = gm;
  c.cardinality = std::move(pmf);
  return c;
}

}  // namespace detail

// Fully parameterized scenarios for the characteristic suite. The five fixed
// kinds share one spatial layout of five Gaussian clusters; only the
// cardinality priors differ. Over/Underestimate keep the truth expectation at
// 5.95 while tilting the prior to 8.63 / 3.60 expected targets.
inline Scenario generate_scenario(ScenarioKind kind, std::uint64_t seed) {
  Scenario sc;
  sc.seed = seed;

  const std::vector<Vec2> centers = {
      {240.0, 260.0}, {960.0, 300.0}, {620.0, 640.0}, {280.0, 960.0}, {950.0, 970.0}};
  const double sigma = 60.0;

  // Per-cluster pmfs, each with expectation 1.19 (5 clusters -> 5.95 total).
  const std::vector<double> base_pmf = {0.06, 0.69, 0.25};
  const std::vector<double> bimodal_pmf = {0.48, 0.0, 0.37, 0.15};
  const std::vector<double> high_var_pmf = {0.32, 0.32, 0.24, 0.09, 0.03};

  auto five_clusters = [&](const std::vector<double>& pmf) {
    for (const auto& c : centers) {
      sc.prior.clusters.push_back(detail::gaussian_cluster(c, sigma, pmf));
    }
  };

  switch (kind) {
    case ScenarioKind::BaseConfig:
      five_clusters(base_pmf);
      break;
    case ScenarioKind::Bimodal:
      five_clusters(bimodal_pmf);
      break;
    case ScenarioKind::HighVariance:
      five_clusters(high_var_pmf);
      break;
    case ScenarioKind::Overestimate:
      five_clusters(high_var_pmf);
      for (auto& c : sc.prior.clusters) {
        c.truth_cardinality = c.cardinality;
        c.cardinality = detail::tilt_pmf(high_var_pmf, 8.63 / 5.0);
      }
      break;
    case ScenarioKind::Underestimate:
      five_clusters(high_var_pmf);
      for (auto& c : sc.prior.clusters) {
        c.truth_cardinality = c.cardinality;
        c.cardinality = detail::tilt_pmf(high_var_pmf, 3.60 / 5.0);
      }
      break;
    case ScenarioKind::Random: {
      Rng rng = derive_stream(seed, "scenario");
      const int n_clusters = 1 + static_cast<int>(rng.uniform_int(6));
      for (int i = 0; i < n_clusters; ++i) {
        const double buffer = 100.0;
        const Vec2 mean(rng.uniform(sc.workspace.min_x + buffer, sc.workspace.max_x - buffer),
                        rng.uniform(sc.workspace.min_y + buffer, sc.workspace.max_y - buffer));
        const double sx = std::max(rng.uniform(0.0, 64.0), 0.5);
        const double sy = std::max(rng.uniform(0.0, 64.0), 0.5);
        const double rho = std::clamp(rng.uniform(-1.0, 1.0), -0.99, 0.99);
        Mat2 cov;
        cov << sx * sx, rho * sx * sy, rho * sx * sy, sy * sy;
        Cluster c;
        GaussianMixture2d gm;
        gm.components.push_back(Gaussian2d{1.0, mean, cov});
        c.spatial = gm;
        c.cardinality.resize(4);  // up to 3 targets per cluster
        double total = 0.0;
        for (auto& p : c.cardinality) {
          p = rng.uniform();
          total += p;
        }
        for (auto& p : c.cardinality) p /= total;
        sc.prior.clusters.push_back(std::move(c));
      }
      break;
    }
  }
  return sc;
}

// Draws the episode's fixed truth: per-cluster counts from the truth
// cardinality pmf, positions from the spatial density, and a uniform agent
// pose. No births or deaths afterwards.
inline WorldState spawn_truth(const Scenario& scenario, Rng& rng) {
  WorldState world;
  int id = 0;
  for (const auto& cluster : scenario.prior.clusters) {
    const int count = rng.categorical(cluster.truth_pmf());
    for (int i = 0; i < count; ++i) {
      TruthTarget t;
      t.id = id++;
      t.state.head<2>() = sample_position(cluster.spatial, rng);
      world.targets.push_back(t);
    }
  }
  world.agent = {rng.uniform(scenario.workspace.min_x, scenario.workspace.max_x),
                 rng.uniform(scenario.workspace.min_y, scenario.workspace.max_y)};
  return world;
}

// Random-walk truth dynamics with boundary reflection.
inline WorldState step_targets(WorldState world, const MotionModel& motion, const Rect& workspace,
                               Rng& rng) {
  for (auto& t : world.targets) {
    Vec4 x = MotionModel::apply(t.state);
    x(0) += motion.position_noise_std * rng.normal();
    x(1) += motion.position_noise_std * rng.normal();
    x(2) += motion.velocity_noise_std * rng.normal();
    x(3) += motion.velocity_noise_std * rng.normal();
    x.head<2>() = workspace.reflect(x.head<2>());
    t.state = x;
  }
  world.step += 1;
  return world;
}

// Deterministic agent kinematics: jump to the plan's waypoint for this step.
inline WorldState step_agent(WorldState world, const ActionPlan& action, int waypoint_index) {
  if (waypoint_index < 0 || waypoint_index >= static_cast<int>(action.waypoints.size())) {
    throw WaypointExhausted();
  }
  world.agent = action.waypoints[static_cast<std::size_t>(waypoint_index)];
  return world;
}

// Noisy scan: independent detections with probability P_D(x, agent), Gaussian
// measurement noise, Poisson clutter uniform over the FOV disc, shuffled
// order, no identities.
inline std::vector<Vec2> sense(const WorldState& world, const SensorModel& sensor, Rng& rng) {
  std::vector<Vec2> out;
  const Eigen::LLT<Mat2> llt(sensor.noise_cov);
  const Mat2 chol = llt.matrixL();
  for (const auto& t : world.targets) {
    const Vec2 pos = SensorModel::measure(t.state);
    if (rng.uniform() < sensor.detection_probability(pos, world.agent)) {
      out.push_back(rng.normal_vec<2>(pos, chol));
    }
  }
  const int clutter = rng.poisson(sensor.clutter_rate);
  for (int i = 0; i < clutter; ++i) {
    // Uniform over the disc via radius sqrt-transform.
    const double r = sensor.outer_radius * std::sqrt(rng.uniform());
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    out.push_back(world.agent + Vec2(r * std::cos(theta), r * std::sin(theta)));
  }
  rng.shuffle(out);
  return out;
}

}  // namespace unisat
