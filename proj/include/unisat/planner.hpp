#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "unisat/entropy.hpp"
#include "unisat/filter.hpp"

namespace unisat {

struct PlannerConfig {
  int horizon = 40;           // steps of look-ahead
  int sampling_interval = 10; // steps between belief evaluations
  double hypervolume_unit = 1.0;
  int action_count = 12;      // radial headings; a stay action is always added
  double step_length = 10.0;  // m/step
  EntropySign entropy_sign = EntropySign::shannon;

  int epochs() const { return horizon / sampling_interval; }
};

struct ActionPlan {
  int id = 0;                  // 0 = stay, 1.. = headings in ascending angle
  std::vector<Vec2> waypoints; // one agent position per step over the horizon
};

// Stay plus `action_count` straight-line plans at evenly spaced headings
// (id 1 = heading 0 deg = +x), waypoints clamped to the workspace.
inline std::vector<ActionPlan> enumerate_actions(const Vec2& pose, const PlannerConfig& cfg,
                                                 const Rect& workspace) {
  std::vector<ActionPlan> plans;
  plans.reserve(static_cast<std::size_t>(cfg.action_count) + 1);
  ActionPlan stay;
  stay.id = 0;
  stay.waypoints.assign(static_cast<std::size_t>(cfg.horizon), pose);
  plans.push_back(std::move(stay));
  for (int a = 0; a < cfg.action_count; ++a) {
    const double heading = 2.0 * std::numbers::pi * static_cast<double>(a) /
                           static_cast<double>(cfg.action_count);
    const Vec2 dir(std::cos(heading), std::sin(heading));
    ActionPlan plan;
    plan.id = a + 1;
    plan.waypoints.reserve(static_cast<std::size_t>(cfg.horizon));
    for (int s = 1; s <= cfg.horizon; ++s) {
      plan.waypoints.push_back(workspace.clamp(pose + cfg.step_length * static_cast<double>(s) * dir));
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

// Predicted Ideal Measurement Set: exact noiseless measurements of the
// MAP-estimated tracks whose detection probability at the agent pose exceeds
// one half. No clutter, no noise.
inline std::vector<Vec2> pims(const GlmbDensity& density, const Vec2& agent_pose,
                              const SensorModel& sensor) {
  std::vector<Vec2> out;
  for (const auto& [label, mean] : map_estimate(density)) {
    const Vec2 pos = SensorModel::measure(mean);
    if (sensor.detection_probability(pos, agent_pose) > 0.5) out.push_back(pos);
  }
  return out;
}

// Rollout value of one action: at each sampling epoch, predict to the epoch
// waypoint, update with the PIMS set (unit clutter density), and accumulate
// the negated posterior LMB entropy. The input density is never modified.
inline double evaluate_action(const GlmbDensity& density, const ActionPlan& action,
                              const MotionModel& motion, const SensorModel& sensor,
                              const FilterCaps& caps, const PlannerConfig& cfg) {
  GlmbDensity rolled = density;
  double value = 0.0;
  for (int epoch = 1; epoch <= cfg.epochs(); ++epoch) {
    rolled = predict_rollout(rolled, motion, static_cast<double>(cfg.sampling_interval), caps);
    const Vec2 waypoint =
        action.waypoints[static_cast<std::size_t>(epoch * cfg.sampling_interval - 1)];
    const std::vector<Vec2> ideal = pims(rolled, waypoint, sensor);
    rolled = update(rolled, ideal, sensor, waypoint, caps, /*use_clutter=*/false).density;
    value -= lmb_entropy(glmb_to_lmb(rolled), cfg.hypervolume_unit, cfg.entropy_sign);
  }
  return value;
}

// Argmax of evaluate_action over the 13 plans; ties go to the lowest id
// (stay first).
inline ActionPlan plan(const GlmbDensity& density, const Vec2& agent_pose,
                       const MotionModel& motion, const SensorModel& sensor,
                       const FilterCaps& caps, const PlannerConfig& cfg, const Rect& workspace) {
  std::vector<ActionPlan> plans = enumerate_actions(agent_pose, cfg, workspace);
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const double v = evaluate_action(density, plans[i], motion, sensor, caps, cfg);
    if (v > best_value) {
      best_value = v;
      best = static_cast<int>(i);
    }
  }
  return plans[static_cast<std::size_t>(best)];
}

}  // namespace unisat
