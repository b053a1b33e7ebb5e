#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "unisat/assignment.hpp"
#include "unisat/types.hpp"

namespace unisat {

struct MetricConfig {
  double cutoff = 50.0;  // m
  double order = 1.0;
  int window = 10;  // steps
};

struct OspaResult {
  double total = 0.0;
  double loc = 0.0;
  double card = 0.0;
};

// Standard OSPA of order p with cutoff c over Euclidean position distance,
// with the usual localization/cardinality decomposition.
inline OspaResult ospa(const std::vector<Vec2>& truth, const std::vector<Vec2>& est,
                       const MetricConfig& cfg) {
  const std::vector<Vec2>* a = &truth;
  const std::vector<Vec2>* b = &est;
  if (a->size() > b->size()) std::swap(a, b);
  const int n = static_cast<int>(a->size());
  const int m = static_cast<int>(b->size());
  if (m == 0) return {};
  const double c = cfg.cutoff;
  const double p = cfg.order;
  double loc_sum = 0.0;
  if (n > 0) {
    Eigen::MatrixXd cost(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        cost(i, j) = std::pow(std::min(((*a)[static_cast<std::size_t>(i)] - (*b)[static_cast<std::size_t>(j)]).norm(), c), p);
      }
    }
    loc_sum = solve_assignment(cost).cost;
  }
  const double card_sum = std::pow(c, p) * static_cast<double>(m - n);
  OspaResult r;
  r.total = std::pow((loc_sum + card_sum) / m, 1.0 / p);
  r.loc = std::pow(loc_sum / m, 1.0 / p);
  r.card = std::pow(card_sum / m, 1.0 / p);
  return r;
}

// A labeled trajectory: step -> position. Gaps mean the track does not exist
// at that step.
using Track2d = std::map<int, Vec2>;
using TrajectorySet = std::vector<Track2d>;

namespace detail {

// Time-averaged base distance between two tracks over the window [lo, hi]:
// min(d, c) where both exist, c where exactly one exists, 0 where neither.
inline double track_base_distance(const Track2d& x, const Track2d& y, int lo, int hi, double c) {
  double sum = 0.0;
  for (int t = lo; t <= hi; ++t) {
    const auto xi = x.find(t);
    const auto yi = y.find(t);
    const bool xe = xi != x.end();
    const bool ye = yi != y.end();
    if (xe && ye) {
      sum += std::min((xi->second - yi->second).norm(), c);
    } else if (xe || ye) {
      sum += c;
    }
  }
  return sum / static_cast<double>(hi - lo + 1);
}

inline bool active_in_window(const Track2d& x, int lo, int hi) {
  const auto it = x.lower_bound(lo);
  return it != x.end() && it->first <= hi;
}

}  // namespace detail

// OSPA(2) at step k: OSPA over tracks using the time-averaged base distance
// on the window [k-w+1, k] (clamped at step 0).
inline OspaResult ospa2_at(const TrajectorySet& truth, const TrajectorySet& est, int k,
                           const MetricConfig& cfg) {
  const int lo = std::max(0, k - cfg.window + 1);
  const int hi = k;
  std::vector<const Track2d*> tx, ty;
  for (const auto& t : truth) {
    if (detail::active_in_window(t, lo, hi)) tx.push_back(&t);
  }
  for (const auto& t : est) {
    if (detail::active_in_window(t, lo, hi)) ty.push_back(&t);
  }
  const std::vector<const Track2d*>* a = &tx;
  const std::vector<const Track2d*>* b = &ty;
  if (a->size() > b->size()) std::swap(a, b);
  const int n = static_cast<int>(a->size());
  const int m = static_cast<int>(b->size());
  if (m == 0) return {};
  const double c = cfg.cutoff;
  const double p = cfg.order;
  double loc_sum = 0.0;
  if (n > 0) {
    Eigen::MatrixXd cost(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        cost(i, j) = std::pow(detail::track_base_distance(*(*a)[static_cast<std::size_t>(i)], *(*b)[static_cast<std::size_t>(j)], lo, hi, c), p);
      }
    }
    loc_sum = solve_assignment(cost).cost;
  }
  const double card_sum = std::pow(c, p) * static_cast<double>(m - n);
  OspaResult r;
  r.total = std::pow((loc_sum + card_sum) / m, 1.0 / p);
  r.loc = std::pow(loc_sum / m, 1.0 / p);
  r.card = std::pow(card_sum / m, 1.0 / p);
  return r;
}

// Full time series of (total, loc, card) for steps 0..T-1.
inline std::vector<OspaResult> ospa2_window(const TrajectorySet& truth, const TrajectorySet& est,
                                            int duration, const MetricConfig& cfg) {
  std::vector<OspaResult> out;
  out.reserve(static_cast<std::size_t>(duration));
  for (int k = 0; k < duration; ++k) out.push_back(ospa2_at(truth, est, k, cfg));
  return out;
}

}  // namespace unisat
