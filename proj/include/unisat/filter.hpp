#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "unisat/assignment.hpp"
#include "unisat/glmb.hpp"
#include "unisat/models.hpp"
#include "unisat/rng.hpp"

namespace unisat {

struct FilterCaps {
  int max_hypotheses = 1000;
  int k_best = 50;             // ranked assignments requested per hypothesis
  double min_existence = 1e-4;
  int particles_per_track = 1000;
  double promotion_trace_threshold = 25.0;  // m^2, position-covariance trace
  double birth_probability = 0.05;
  double birth_assoc_threshold = 0.5;
  int prior_merge_cap = 1000;
};

namespace detail {

// K highest-weight outcomes of independent Bernoulli events, best first.
// Bit i of the mask set = event i occurs. Weight = prod p or (1-p).
inline std::vector<std::pair<std::uint64_t, double>> top_k_bernoulli(
    const std::vector<double>& probs, int k) {
  const int n = static_cast<int>(probs.size());
  std::uint64_t base_mask = 0;
  double base_log = 0.0;
  struct Flip {
    double cost;
    int bit;
  };
  std::vector<Flip> flips;
  for (int i = 0; i < n; ++i) {
    const double p = probs[static_cast<std::size_t>(i)];
    if (p >= 0.5) base_mask |= 1ull << i;
    const double hi = std::max(p, 1.0 - p);
    const double lo = std::min(p, 1.0 - p);
    base_log += std::log(hi);
    if (lo > 0.0) flips.push_back({std::log(hi) - std::log(lo), i});
  }
  std::sort(flips.begin(), flips.end(), [](const Flip& a, const Flip& b) { return a.cost < b.cost; });

  // Best-first enumeration over flip subsets (classic k-smallest subset sums).
  struct Node {
    double cost;
    std::uint64_t flip_mask;
    int last;  // index into `flips` of the most recent flip
    bool operator>(const Node& o) const { return cost > o.cost; }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap;
  std::vector<std::pair<std::uint64_t, double>> out;
  heap.push({0.0, 0, -1});
  while (!heap.empty() && static_cast<int>(out.size()) < k) {
    const Node node = heap.top();
    heap.pop();
    std::uint64_t mask = base_mask;
    for (std::size_t f = 0; f < flips.size(); ++f) {
      if (node.flip_mask & (1ull << f)) mask ^= 1ull << flips[f].bit;
    }
    out.emplace_back(mask, std::exp(base_log - node.cost));
    const int next = node.last + 1;
    if (next < static_cast<int>(flips.size())) {
      heap.push({node.cost + flips[static_cast<std::size_t>(next)].cost,
                 node.flip_mask | (1ull << next), next});
      if (node.last >= 0) {
        heap.push({node.cost - flips[static_cast<std::size_t>(node.last)].cost +
                       flips[static_cast<std::size_t>(next)].cost,
                   (node.flip_mask ^ (1ull << node.last)) | (1ull << next), next});
      }
    }
  }
  return out;
}

inline double survival_probability(const TrackState& s, const MotionModel& model) {
  return is_cloud(s) ? model.survival_smc : model.survival_gm;
}

struct LogSum {
  double max_term = -std::numeric_limits<double>::infinity();
  double shifted_sum = 0.0;

  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_term) {
      shifted_sum = shifted_sum * std::exp(max_term - log_term) + 1.0;
      max_term = log_term;
    } else {
      shifted_sum += std::exp(log_term - max_term);
    }
  }

  double log_value() const {
    if (shifted_sum <= 0.0) return -std::numeric_limits<double>::infinity();
    return max_term + std::log(shifted_sum);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// prediction

namespace detail {

inline TrackState propagate(const TrackState& s, const MotionModel& model, Rng* rng,
                            double steps) {
  if (const auto* cloud = std::get_if<ParticleCloud>(&s)) {
    ParticleCloud out = *cloud;
    const double pos_std = model.position_noise_std * std::sqrt(steps);
    const double vel_std = model.velocity_noise_std * std::sqrt(steps);
    for (int i = 0; i < out.size(); ++i) {
      Vec4 x = MotionModel::apply(out.states.col(i));
      if (rng) {
        x(0) += pos_std * rng->normal();
        x(1) += pos_std * rng->normal();
        x(2) += vel_std * rng->normal();
        x(3) += vel_std * rng->normal();
      }
      out.states.col(i) = x;
    }
    return out;
  }
  const Mat4 f = MotionModel::transition();
  const Mat4 q = model.process_noise(steps);
  GaussianMixture out = std::get<GaussianMixture>(s);
  for (auto& comp : out.components) {
    comp.mean = MotionModel::apply(comp.mean);
    comp.cov = f * comp.cov * f.transpose() + q;
  }
  return out;
}

inline GlmbDensity predict_impl(const GlmbDensity& density, const MotionModel& model, Rng* rng,
                                double steps, int branch_cap, int max_hypotheses) {
  GlmbDensity out;
  out.table.reserve(density.table.size());
  std::vector<double> survival(density.table.size());
  bool any_death = false;
  for (std::size_t i = 0; i < density.table.size(); ++i) {
    const auto& row = density.table[i];
    survival[i] = survival_probability(*row.state, model);
    survival[i] = std::pow(survival[i], steps);
    if (survival[i] < 1.0) any_death = true;
    out.table.push_back(
        Track{row.label, std::make_shared<TrackState>(propagate(*row.state, model, rng, steps))});
  }
  if (!any_death) {
    out.hypotheses = density.hypotheses;
    return out;
  }
  for (const auto& h : density.hypotheses) {
    std::vector<int> mortal;
    std::vector<double> mortal_ps;
    std::vector<int> immortal;
    for (int t : h.tracks) {
      if (survival[static_cast<std::size_t>(t)] < 1.0) {
        mortal.push_back(t);
        mortal_ps.push_back(survival[static_cast<std::size_t>(t)]);
      } else {
        immortal.push_back(t);
      }
    }
    if (mortal.empty()) {
      out.hypotheses.push_back(h);
      continue;
    }
    for (const auto& [mask, w] : detail::top_k_bernoulli(mortal_ps, branch_cap)) {
      Hypothesis child;
      child.tracks = immortal;
      for (std::size_t i = 0; i < mortal.size(); ++i) {
        if (mask & (1ull << i)) child.tracks.push_back(mortal[i]);
      }
      std::sort(child.tracks.begin(), child.tracks.end());
      child.weight = h.weight * w;
      out.hypotheses.push_back(std::move(child));
    }
  }
  out = merge_duplicate_hypotheses(std::move(out));
  std::stable_sort(out.hypotheses.begin(), out.hypotheses.end(),
                   [](const Hypothesis& a, const Hypothesis& b) { return a.weight > b.weight; });
  if (static_cast<int>(out.hypotheses.size()) > max_hypotheses) {
    out.hypotheses.resize(static_cast<std::size_t>(max_hypotheses));
  }
  return compact(normalize_hypotheses(std::move(out)));
}

}  // namespace detail

// Chapman-Kolmogorov prediction: particles get sampled process noise, Gaussian
// components the analytic covariance inflation, and survival splits each
// hypothesis into death branches when P_S < 1.
inline GlmbDensity predict(const GlmbDensity& density, const MotionModel& model, Rng& rng,
                           const FilterCaps& caps = {}) {
  return detail::predict_impl(density, model, &rng, 1.0, caps.k_best, caps.max_hypotheses);
}

// Deterministic multi-step prediction used inside planner rollouts: identical
// dynamics but no particle noise draws, with process noise scaled by the
// number of elapsed steps.
inline GlmbDensity predict_rollout(const GlmbDensity& density, const MotionModel& model,
                                   double steps, const FilterCaps& caps = {}) {
  return detail::predict_impl(density, model, nullptr, steps, caps.k_best, caps.max_hypotheses);
}

// ---------------------------------------------------------------------------
// measurement likelihoods

namespace detail {

// log <p, P_D(x) N(z; q(x), Sigma)> - log kappa
inline double log_detection_likelihood(const TrackState& s, const Vec2& z,
                                       const SensorModel& sensor, const Vec2& agent,
                                       double clutter_density) {
  LogSum acc;
  if (const auto* cloud = std::get_if<ParticleCloud>(&s)) {
    for (int i = 0; i < cloud->size(); ++i) {
      const double w = cloud->weights(i);
      if (w <= 0.0) continue;
      const Vec2 pos = cloud->states.col(i).head<2>();
      const double pd = sensor.detection_probability(pos, agent);
      if (pd <= 0.0) continue;
      acc.add(std::log(w * pd) + log_gaussian2(z, pos, sensor.noise_cov));
    }
  } else {
    const auto h = SensorModel::measurement_matrix();
    for (const auto& comp : std::get<GaussianMixture>(s).components) {
      if (comp.weight <= 0.0) continue;
      const double pd = sensor.detection_probability(comp.mean.head<2>(), agent);
      if (pd <= 0.0) continue;
      const Mat2 innov_cov = h * comp.cov * h.transpose() + sensor.noise_cov;
      acc.add(std::log(comp.weight * pd) + log_gaussian2(z, comp.mean.head<2>(), innov_cov));
    }
  }
  return acc.log_value() - std::log(clutter_density);
}

// <p, 1 - P_D(x)>
inline double miss_likelihood(const TrackState& s, const SensorModel& sensor, const Vec2& agent) {
  double acc = 0.0;
  if (const auto* cloud = std::get_if<ParticleCloud>(&s)) {
    for (int i = 0; i < cloud->size(); ++i) {
      acc += cloud->weights(i) *
             (1.0 - sensor.detection_probability(cloud->states.col(i).head<2>(), agent));
    }
  } else {
    for (const auto& comp : std::get<GaussianMixture>(s).components) {
      acc += comp.weight * (1.0 - sensor.detection_probability(comp.mean.head<2>(), agent));
    }
  }
  return acc;
}

inline TrackState miss_update(const TrackState& s, const SensorModel& sensor, const Vec2& agent) {
  if (const auto* cloud = std::get_if<ParticleCloud>(&s)) {
    ParticleCloud out = *cloud;
    for (int i = 0; i < out.size(); ++i) {
      out.weights(i) *= 1.0 - sensor.detection_probability(out.states.col(i).head<2>(), agent);
    }
    const double total = out.weights.sum();
    out.weights /= total;
    return out;
  }
  GaussianMixture out = std::get<GaussianMixture>(s);
  double total = 0.0;
  for (auto& comp : out.components) {
    comp.weight *= 1.0 - sensor.detection_probability(comp.mean.head<2>(), agent);
    total += comp.weight;
  }
  for (auto& comp : out.components) comp.weight /= total;
  return out;
}

inline TrackState detection_update(const TrackState& s, const Vec2& z, const SensorModel& sensor,
                                   const Vec2& agent) {
  if (const auto* cloud = std::get_if<ParticleCloud>(&s)) {
    ParticleCloud out = *cloud;
    Eigen::VectorXd logw(out.size());
    for (int i = 0; i < out.size(); ++i) {
      const Vec2 pos = out.states.col(i).head<2>();
      const double pd = sensor.detection_probability(pos, agent);
      const double w = out.weights(i);
      logw(i) = (w > 0.0 && pd > 0.0)
                    ? std::log(w * pd) + log_gaussian2(z, pos, sensor.noise_cov)
                    : -std::numeric_limits<double>::infinity();
    }
    const double shift = logw.maxCoeff();
    for (int i = 0; i < out.size(); ++i) out.weights(i) = std::exp(logw(i) - shift);
    out.weights /= out.weights.sum();
    return out;
  }
  const auto h = SensorModel::measurement_matrix();
  GaussianMixture out;
  double total = 0.0;
  for (const auto& comp : std::get<GaussianMixture>(s).components) {
    const double pd = sensor.detection_probability(comp.mean.head<2>(), agent);
    if (comp.weight <= 0.0 || pd <= 0.0) continue;
    const Mat2 innov_cov = h * comp.cov * h.transpose() + sensor.noise_cov;
    const Eigen::Matrix<double, 4, 2> gain = comp.cov * h.transpose() * innov_cov.inverse();
    GaussianComponent upd;
    upd.mean = comp.mean + gain * (z - comp.mean.head<2>());
    const Mat4 ikh = Mat4::Identity() - gain * h;
    upd.cov = ikh * comp.cov * ikh.transpose() + gain * sensor.noise_cov * gain.transpose();
    upd.weight = comp.weight * pd * std::exp(log_gaussian2(z, comp.mean.head<2>(), innov_cov));
    total += upd.weight;
    out.components.push_back(std::move(upd));
  }
  for (auto& comp : out.components) comp.weight /= total;
  return out;
}

}  // namespace detail

// Single-track association likelihood: the detection branch
// <p, P_D N(z; q(x), Sigma)> / kappa(z), or the negative-observation branch
// <p, 1 - P_D>.
inline double association_likelihood(const TrackState& track, const std::optional<Vec2>& z,
                                     const SensorModel& sensor, const Vec2& agent) {
  if (!z) return detail::miss_likelihood(track, sensor, agent);
  const double kappa = sensor.clutter_density();
  if (kappa <= 0.0) throw ZeroClutterDensity();
  return std::exp(detail::log_detection_likelihood(track, *z, sensor, agent, kappa));
}

// ---------------------------------------------------------------------------
// measurement update

struct UpdateResult {
  GlmbDensity density;
  // Total posterior probability that measurement j was associated to a track.
  std::vector<double> measurement_assoc_prob;
  bool fallback = false;  // no feasible association anywhere; prior returned
};

// Ranked-assignment GLMB update with negative observations. Per hypothesis,
// association maps are enumerated K-best over the cost matrix of
// -log likelihoods (columns: each measurement, then one miss column per
// track); posterior weights are prior weight times the product of per-track
// branch likelihoods. With use_clutter=false (ideal-measurement rollout
// updates) the clutter intensity is taken to its zero limit: measurements
// cannot be explained as clutter, so every one must be associated and
// hypotheses that cannot cover the set get zero weight.
inline UpdateResult update(const GlmbDensity& prior, const std::vector<Vec2>& measurements,
                           const SensorModel& sensor, const Vec2& agent, const FilterCaps& caps,
                           bool use_clutter = true) {
  const int m = static_cast<int>(measurements.size());
  const int n_entries = static_cast<int>(prior.table.size());
  double kappa = 1.0;
  if (use_clutter) {
    kappa = sensor.clutter_density();
    if (m > 0 && kappa <= 0.0) throw ZeroClutterDensity();
  }

  // Branch likelihood cache per table entry: columns 0..m-1 detection,
  // column m miss.
  Eigen::MatrixXd log_branch(n_entries, m + 1);
  for (int e = 0; e < n_entries; ++e) {
    const TrackState& s = *prior.table[static_cast<std::size_t>(e)].state;
    for (int j = 0; j < m; ++j) {
      log_branch(e, j) = detail::log_detection_likelihood(
          s, measurements[static_cast<std::size_t>(j)], sensor, agent, kappa);
    }
    const double miss = detail::miss_likelihood(s, sensor, agent);
    log_branch(e, m) = miss > 0.0 ? std::log(miss) : -std::numeric_limits<double>::infinity();
  }

  // Staging of posterior table rows, shared across hypotheses: key is
  // (prior entry, branch).
  std::map<std::pair<int, int>, int> staged_index;
  std::vector<std::pair<int, int>> staged_keys;
  auto stage = [&](int entry, int branch) {
    const auto [it, inserted] =
        staged_index.emplace(std::make_pair(entry, branch), static_cast<int>(staged_keys.size()));
    if (inserted) staged_keys.emplace_back(entry, branch);
    return it->second;
  };

  struct Candidate {
    std::vector<int> tracks;        // staged indices, sorted
    std::vector<int> assigned;      // measurement indices used
    double log_weight;
  };
  std::vector<Candidate> candidates;

  for (const auto& h : prior.hypotheses) {
    if (h.weight <= 0.0) continue;
    const double log_prior = std::log(h.weight);
    const int n = static_cast<int>(h.tracks.size());
    if (n == 0) {
      // With clutter, all measurements are explained as clutter; in the
      // zero-clutter limit a non-empty set rules the empty hypothesis out.
      if (use_clutter || m == 0) candidates.push_back({{}, {}, log_prior});
      continue;
    }
    if (m == 0) {
      double lw = log_prior;
      Candidate c;
      for (int i = 0; i < n; ++i) {
        const int e = h.tracks[static_cast<std::size_t>(i)];
        lw += log_branch(e, m);
        c.tracks.push_back(stage(e, m));
      }
      if (lw == -std::numeric_limits<double>::infinity()) continue;
      std::sort(c.tracks.begin(), c.tracks.end());
      c.log_weight = lw;
      candidates.push_back(std::move(c));
      continue;
    }
    if (use_clutter) {
      // Track rows, measurement columns plus one miss column per track.
      Eigen::MatrixXd cost(n, m + n);
      cost.setConstant(kForbiddenCost);
      for (int i = 0; i < n; ++i) {
        const int e = h.tracks[static_cast<std::size_t>(i)];
        for (int j = 0; j <= m; ++j) {
          const double lv = log_branch(e, j);
          const int col = j < m ? j : m + i;
          if (lv > -kForbiddenCost) cost(i, col) = std::min(-lv, kForbiddenCost);
        }
      }
      for (const auto& sol : murty_kbest(cost, caps.k_best)) {
        Candidate c;
        c.log_weight = log_prior - sol.cost;
        for (int i = 0; i < n; ++i) {
          const int e = h.tracks[static_cast<std::size_t>(i)];
          const int col = sol.row_to_col[static_cast<std::size_t>(i)];
          const int branch = col < m ? col : m;
          if (branch < m) c.assigned.push_back(branch);
          c.tracks.push_back(stage(e, branch));
        }
        std::sort(c.tracks.begin(), c.tracks.end());
        candidates.push_back(std::move(c));
      }
    } else {
      // Zero-clutter limit: every measurement must be covered, so rows are
      // measurements and columns are tracks. Unassigned tracks keep their
      // miss factor; assigned ones swap it for the detection likelihood.
      if (m > n) continue;
      double base = log_prior;
      Eigen::VectorXd log_miss(n);
      for (int i = 0; i < n; ++i) {
        const double lv = log_branch(h.tracks[static_cast<std::size_t>(i)], m);
        log_miss(i) = std::max(lv, -kForbiddenCost);
        base += log_miss(i);
      }
      Eigen::MatrixXd cost(m, n);
      cost.setConstant(kForbiddenCost);
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
          const double lv = log_branch(h.tracks[static_cast<std::size_t>(i)], j);
          if (lv > -kForbiddenCost) cost(j, i) = log_miss(i) - lv;
        }
      }
      for (const auto& sol : murty_kbest(cost, caps.k_best)) {
        Candidate c;
        c.log_weight = base - sol.cost;
        if (c.log_weight <= -kForbiddenCost / 2) continue;
        std::vector<int> branch_of(static_cast<std::size_t>(n), m);
        for (int j = 0; j < m; ++j) {
          branch_of[static_cast<std::size_t>(sol.row_to_col[static_cast<std::size_t>(j)])] = j;
          c.assigned.push_back(j);
        }
        for (int i = 0; i < n; ++i) {
          c.tracks.push_back(stage(h.tracks[static_cast<std::size_t>(i)], branch_of[static_cast<std::size_t>(i)]));
        }
        std::sort(c.tracks.begin(), c.tracks.end());
        candidates.push_back(std::move(c));
      }
    }
  }

  UpdateResult result;
  result.measurement_assoc_prob.assign(static_cast<std::size_t>(m), 0.0);
  if (candidates.empty()) {
    result.density = prior;
    result.fallback = true;
    return result;
  }

  // Normalize in log space, merge duplicates, truncate.
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) shift = std::max(shift, c.log_weight);
  std::map<std::vector<int>, std::size_t> dedup;
  std::vector<Candidate> merged;
  for (auto& c : candidates) {
    const auto [it, inserted] = dedup.emplace(c.tracks, merged.size());
    if (inserted) {
      c.log_weight = std::exp(c.log_weight - shift);  // now linear
      merged.push_back(std::move(c));
    } else {
      merged[it->second].log_weight += std::exp(c.log_weight - shift);
    }
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Candidate& a, const Candidate& b) { return a.log_weight > b.log_weight; });
  if (static_cast<int>(merged.size()) > caps.max_hypotheses) {
    merged.resize(static_cast<std::size_t>(caps.max_hypotheses));
  }
  double total = 0.0;
  for (const auto& c : merged) total += c.log_weight;

  // Materialize only the staged posterior states that survived.
  std::vector<int> staged_to_final(staged_keys.size(), -1);
  GlmbDensity post;
  for (const auto& c : merged) {
    Hypothesis h;
    h.weight = c.log_weight / total;
    for (int s : c.tracks) {
      if (staged_to_final[static_cast<std::size_t>(s)] < 0) {
        const auto [entry, branch] = staged_keys[static_cast<std::size_t>(s)];
        const auto& row = prior.table[static_cast<std::size_t>(entry)];
        TrackState upd =
            branch < m ? detail::detection_update(*row.state,
                                                  measurements[static_cast<std::size_t>(branch)],
                                                  sensor, agent)
                       : detail::miss_update(*row.state, sensor, agent);
        staged_to_final[static_cast<std::size_t>(s)] = static_cast<int>(post.table.size());
        post.table.push_back(Track{row.label, std::make_shared<TrackState>(std::move(upd))});
      }
      h.tracks.push_back(staged_to_final[static_cast<std::size_t>(s)]);
    }
    std::sort(h.tracks.begin(), h.tracks.end());
    for (int j : c.assigned) {
      result.measurement_assoc_prob[static_cast<std::size_t>(j)] += h.weight;
    }
    post.hypotheses.push_back(std::move(h));
  }
  result.density = compact(std::move(post));
  return result;
}

// ---------------------------------------------------------------------------
// truncation, promotion, birth, resampling

// Keeps the top hypotheses by weight, drops labels whose marginal existence
// falls below min_existence, merges duplicate label sets, renormalizes.
inline GlmbDensity truncate(GlmbDensity density, int max_hypotheses, double min_existence) {
  std::stable_sort(density.hypotheses.begin(), density.hypotheses.end(),
                   [](const Hypothesis& a, const Hypothesis& b) { return a.weight > b.weight; });
  if (static_cast<int>(density.hypotheses.size()) > std::max(max_hypotheses, 1)) {
    density.hypotheses.resize(static_cast<std::size_t>(std::max(max_hypotheses, 1)));
  }
  if (min_existence > 0.0) {
    density = normalize_hypotheses(std::move(density));
    std::vector<double> marginal(density.table.size(), 0.0);
    for (const auto& h : density.hypotheses) {
      for (int t : h.tracks) marginal[static_cast<std::size_t>(t)] += h.weight;
    }
    // Existence is per label, summed over histories.
    std::map<Label, double> label_existence;
    for (std::size_t i = 0; i < density.table.size(); ++i) {
      label_existence[density.table[i].label] += marginal[i];
    }
    for (auto& h : density.hypotheses) {
      std::erase_if(h.tracks, [&](int t) {
        return label_existence[density.table[static_cast<std::size_t>(t)].label] < min_existence;
      });
    }
  }
  density = merge_duplicate_hypotheses(std::move(density));
  return compact(normalize_hypotheses(std::move(density)));
}

// Converts any particle cloud whose weighted position-covariance trace is
// below the threshold into a single moment-matched Gaussian. Labels and
// hypothesis weights are untouched.
inline GlmbDensity promote_tracks(GlmbDensity density, double trace_threshold) {
  for (auto& row : density.table) {
    if (!is_cloud(*row.state)) continue;
    const auto& cloud = std::get<ParticleCloud>(*row.state);
    if (position_covariance_trace(*row.state) < trace_threshold) {
      GaussianMixture g;
      g.components.push_back(moment_match(cloud));
      row.state = std::make_shared<TrackState>(std::move(g));
    }
  }
  return density;
}

// Births one tentative Gaussian track per unexplained measurement, centered
// on the measurement, and extends every hypothesis with the Bernoulli
// present/absent product.
inline GlmbDensity adaptive_birth(const GlmbDensity& density, const std::vector<Vec2>& unused,
                                  const SensorModel& sensor, int current_step,
                                  double birth_probability, const FilterCaps& caps) {
  if (unused.empty() || birth_probability <= 0.0) return density;
  GlmbDensity out;
  out.table = density.table;
  int next_index = density.max_label_index(current_step) + 1;
  std::vector<int> birth_rows;
  for (const Vec2& z : unused) {
    GaussianComponent g;
    g.mean << z.x(), z.y(), 0.0, 0.0;
    Vec4 d;
    d << 4.0 * sensor.noise_cov(0, 0), 4.0 * sensor.noise_cov(1, 1), 1.0, 1.0;
    g.cov = d.asDiagonal();
    GaussianMixture gm;
    gm.components.push_back(g);
    birth_rows.push_back(static_cast<int>(out.table.size()));
    out.table.push_back(
        Track{Label{current_step, next_index++}, std::make_shared<TrackState>(std::move(gm))});
  }
  const std::vector<double> probs(unused.size(), birth_probability);
  const auto branches = detail::top_k_bernoulli(probs, caps.k_best);
  for (const auto& h : density.hypotheses) {
    for (const auto& [mask, w] : branches) {
      Hypothesis child;
      child.tracks = h.tracks;
      for (std::size_t i = 0; i < birth_rows.size(); ++i) {
        if (mask & (1ull << i)) child.tracks.push_back(birth_rows[i]);
      }
      child.weight = h.weight * w;
      out.hypotheses.push_back(std::move(child));
    }
  }
  out = merge_duplicate_hypotheses(std::move(out));
  std::stable_sort(out.hypotheses.begin(), out.hypotheses.end(),
                   [](const Hypothesis& a, const Hypothesis& b) { return a.weight > b.weight; });
  if (static_cast<int>(out.hypotheses.size()) > caps.max_hypotheses) {
    out.hypotheses.resize(static_cast<std::size_t>(caps.max_hypotheses));
  }
  return compact(normalize_hypotheses(std::move(out)));
}

// Systematic resampling, applied only when the effective sample size
// 1 / sum(w^2) drops below target_count / 2.
inline ParticleCloud resample_cloud(const ParticleCloud& cloud, int target_count, Rng& rng) {
  const double ess = 1.0 / cloud.weights.squaredNorm();
  if (ess >= static_cast<double>(target_count) / 2.0) return cloud;
  ParticleCloud out;
  out.states.resize(kStateDim, target_count);
  out.weights.setConstant(target_count, 1.0 / static_cast<double>(target_count));
  const double offset = rng.uniform();
  double cumulative = cloud.weights(0);
  int src = 0;
  for (int i = 0; i < target_count; ++i) {
    const double u = (static_cast<double>(i) + offset) / static_cast<double>(target_count);
    while (cumulative < u && src + 1 < cloud.size()) cumulative += cloud.weights(++src);
    out.states.col(i) = cloud.states.col(src);
  }
  return out;
}

// Resamples every particle-cloud row of the density in table order.
inline GlmbDensity resample_density(GlmbDensity density, int target_count, Rng& rng) {
  for (auto& row : density.table) {
    if (const auto* cloud = std::get_if<ParticleCloud>(row.state.get())) {
      const double ess = 1.0 / cloud->weights.squaredNorm();
      if (ess < static_cast<double>(target_count) / 2.0) {
        row.state = std::make_shared<TrackState>(resample_cloud(*cloud, target_count, rng));
      }
    }
  }
  return density;
}

}  // namespace unisat
