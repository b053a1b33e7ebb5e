#pragma once

#include <cstdio>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "unisat/config.hpp"
#include "unisat/entropy.hpp"
#include "unisat/filter.hpp"
#include "unisat/metrics.hpp"
#include "unisat/planner.hpp"
#include "unisat/prior.hpp"
#include "unisat/sim.hpp"

namespace unisat {

// Baseline control policies for comparison runs.
enum class PolicyKind { unisat, random_action, lawnmower };

struct StepRecord {
  int step = 0;
  Vec2 agent = Vec2::Zero();
  std::vector<TruthTarget> truth;
  std::vector<std::pair<Label, Vec4>> estimates;
  int measurement_count = 0;
  OspaResult ospa2;
  int hypothesis_count = 0;
  double entropy = 0.0;
};

struct EpisodeLog {
  std::string scenario_digest;
  std::uint64_t seed = 0;
  std::string config_snapshot;
  std::string code_version = kCodeVersion;
  std::vector<StepRecord> records;
  bool failed = false;
  std::string failure;

  double final_ospa2() const { return records.empty() ? 0.0 : records.back().ospa2.total; }
};

namespace detail {

// Boustrophedon sweep waypoints over the workspace, strip spacing tied to the
// sensor footprint.
inline std::vector<Vec2> lawnmower_waypoints(const Rect& ws, double spacing) {
  std::vector<Vec2> wps;
  const double margin = spacing / 2.0;
  bool up = true;
  for (double x = ws.min_x + margin; x <= ws.max_x - margin + 1e-9; x += spacing) {
    if (up) {
      wps.emplace_back(x, ws.min_y + margin);
      wps.emplace_back(x, ws.max_y - margin);
    } else {
      wps.emplace_back(x, ws.max_y - margin);
      wps.emplace_back(x, ws.min_y + margin);
    }
    up = !up;
  }
  return wps;
}

inline Vec2 move_toward(const Vec2& from, const Vec2& to, double max_step) {
  const Vec2 d = to - from;
  const double dist = d.norm();
  if (dist <= max_step) return to;
  return from + d * (max_step / dist);
}

}  // namespace detail

// One full mission: initialize the belief from the prior, then per step
// sense -> predict -> update -> truncate -> resample -> promote -> birth,
// replanning every sampling interval. Deterministic given (scenario, seed).
inline EpisodeLog run_episode(const Scenario& scenario, std::uint64_t seed,
                              PolicyKind policy = PolicyKind::unisat) {
  EpisodeLog log;
  log.scenario_digest = scenario_digest(scenario);
  log.seed = seed;
  log.config_snapshot = scenario_to_json(scenario).dump();

  Rng init_rng = derive_stream(seed, "init");
  Rng truth_rng = derive_stream(seed, "truth");
  Rng sensor_rng = derive_stream(seed, "sensor");
  Rng filter_rng = derive_stream(seed, "filter");
  Rng policy_rng = derive_stream(seed, "policy");

  const FilterCaps& caps = scenario.filter_caps;
  const PlannerConfig& pcfg = scenario.planner;

  GlmbDensity belief = init_belief(scenario.prior, caps.particles_per_track,
                                   caps.prior_merge_cap, init_rng);
  WorldState world = spawn_truth(scenario, truth_rng);

  std::map<int, Track2d> truth_traj;
  std::map<Label, Track2d> est_traj;

  ActionPlan current_plan;
  int plan_offset = 0;
  const std::vector<Vec2> mower =
      detail::lawnmower_waypoints(scenario.workspace, 1.5 * scenario.sensor.inner_radius);
  std::size_t mower_next = 0;

  for (int k = 0; k < scenario.duration; ++k) {
    const std::vector<Vec2> z = sense(world, scenario.sensor, sensor_rng);
    if (k > 0) belief = predict(belief, scenario.motion, filter_rng, caps);
    UpdateResult upd = update(belief, z, scenario.sensor, world.agent, caps);
    belief = truncate(std::move(upd.density), caps.max_hypotheses, caps.min_existence);
    belief = resample_density(std::move(belief), caps.particles_per_track, filter_rng);
    belief = promote_tracks(std::move(belief), caps.promotion_trace_threshold);
    if (!upd.fallback) {
      std::vector<Vec2> unused;
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (upd.measurement_assoc_prob[j] < caps.birth_assoc_threshold) unused.push_back(z[j]);
      }
      belief = adaptive_birth(belief, unused, scenario.sensor, k, caps.birth_probability, caps);
    }

    StepRecord rec;
    rec.step = k;
    rec.agent = world.agent;
    rec.truth = world.targets;
    rec.estimates = map_estimate(belief);
    rec.measurement_count = static_cast<int>(z.size());
    rec.hypothesis_count = static_cast<int>(belief.hypotheses.size());
    rec.entropy = lmb_entropy(glmb_to_lmb(belief), pcfg.hypervolume_unit, pcfg.entropy_sign);

    for (const auto& t : world.targets) truth_traj[t.id][k] = SensorModel::measure(t.state);
    for (const auto& [label, mean] : rec.estimates) est_traj[label][k] = SensorModel::measure(mean);
    TrajectorySet truth_set, est_set;
    for (const auto& [id, tr] : truth_traj) truth_set.push_back(tr);
    for (const auto& [label, tr] : est_traj) est_set.push_back(tr);
    rec.ospa2 = ospa2_at(truth_set, est_set, k, scenario.metric);
    log.records.push_back(std::move(rec));

    // Execute the policy.
    if (policy == PolicyKind::lawnmower) {
      if (!mower.empty()) {
        if ((world.agent - mower[mower_next]).norm() < 1e-9) {
          mower_next = (mower_next + 1) % mower.size();
        }
        world.agent = detail::move_toward(world.agent, mower[mower_next], pcfg.step_length);
      }
    } else {
      if (k % pcfg.sampling_interval == 0) {
        if (policy == PolicyKind::unisat) {
          current_plan = plan(belief, world.agent, scenario.motion, scenario.sensor, caps, pcfg,
                              scenario.workspace);
        } else {
          const auto plans = enumerate_actions(world.agent, pcfg, scenario.workspace);
          current_plan = plans[policy_rng.uniform_int(plans.size())];
        }
        plan_offset = 0;
      }
      world = step_agent(std::move(world), current_plan, plan_offset++);
    }
    world = step_targets(std::move(world), scenario.motion, scenario.workspace, truth_rng);
  }
  return log;
}

// ---------------------------------------------------------------------------
// persistence

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace detail

// Plot-ready per-step CSV; `#` comment lines carry provenance.
inline std::string episode_csv(const EpisodeLog& log) {
  std::ostringstream out;
  out << "# seed=" << log.seed << "\n";
  out << "# digest=" << log.scenario_digest << "\n";
  out << "# code_version=" << log.code_version << "\n";
  out << "step,ospa2_total,ospa2_loc,ospa2_card,entropy,n_hypotheses,agent_x,agent_y\n";
  for (const auto& r : log.records) {
    out << r.step << ',' << detail::fmt_double(r.ospa2.total) << ','
        << detail::fmt_double(r.ospa2.loc) << ',' << detail::fmt_double(r.ospa2.card) << ','
        << detail::fmt_double(r.entropy) << ',' << r.hypothesis_count << ','
        << detail::fmt_double(r.agent.x()) << ',' << detail::fmt_double(r.agent.y()) << "\n";
  }
  return out.str();
}

inline std::string truth_csv(const EpisodeLog& log) {
  std::ostringstream out;
  out << "step,id,x,y\n";
  for (const auto& r : log.records) {
    for (const auto& t : r.truth) {
      out << r.step << ',' << t.id << ',' << detail::fmt_double(t.state(0)) << ','
          << detail::fmt_double(t.state(1)) << "\n";
    }
  }
  return out.str();
}

inline std::string estimates_csv(const EpisodeLog& log) {
  std::ostringstream out;
  out << "step,birth_step,index,x,y\n";
  for (const auto& r : log.records) {
    for (const auto& [label, mean] : r.estimates) {
      out << r.step << ',' << label.birth_step << ',' << label.index << ','
          << detail::fmt_double(mean(0)) << ',' << detail::fmt_double(mean(1)) << "\n";
    }
  }
  return out.str();
}

// Reads a trajectory CSV (step,<id fields...>,x,y); tracks are keyed by the
// id fields between step and x.
inline TrajectorySet read_trajectories_csv(std::istream& in) {
  std::map<std::string, Track2d> tracks;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() < 3) continue;
    const int step = std::stoi(cols.front());
    const double y = std::stod(cols.back());
    const double x = std::stod(cols[cols.size() - 2]);
    std::string key;
    for (std::size_t i = 1; i + 2 < cols.size(); ++i) key += cols[i] + "/";
    tracks[key][step] = Vec2(x, y);
  }
  TrajectorySet out;
  for (auto& [key, tr] : tracks) out.push_back(std::move(tr));
  return out;
}

}  // namespace unisat
