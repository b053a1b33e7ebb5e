#pragma once

#include <cmath>
#include <numbers>

#include "unisat/glmb.hpp"

namespace unisat {

// Two sign readings of the Gaussian inner product exist in the literature:
// `paper` uses +0.5 log det(2 pi e Sigma) verbatim, `shannon` the standard
// expected-log-density -0.5 log det(2 pi e Sigma). Under `paper` a planner
// minimizing h is rewarded for letting track covariances grow, so `shannon`
// is the default.
enum class EntropySign { paper, shannon };

namespace detail {

inline double gaussian_inner_product(const TrackState& s, double log_k, EntropySign sign) {
  const Mat2 cov_pos =
      regularize_covariance<2>(Mat2(covariance(s).topLeftCorner<2, 2>()));
  const double log_det =
      std::log(cov_pos(0, 0) * cov_pos(1, 1) - cov_pos(0, 1) * cov_pos(1, 0));
  const double half_log_det_2pie = 0.5 * (log_det + 2.0 * std::log(2.0 * std::numbers::pi * std::numbers::e));
  return (sign == EntropySign::paper ? half_log_det_2pie : -half_log_det_2pie) + log_k;
}

inline double cloud_inner_product(const ParticleCloud& c, double existence, double log_k) {
  double acc = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    const double w = c.weights(i);
    if (w > 0.0) acc += w * std::log(existence * w);
  }
  return acc + log_k;
}

}  // namespace detail

// Differential entropy of an LMB:
//   h(X) = -sum_l [ r ln r + (1-r) ln(1-r) + r <p, ln(K p)> ]
// with 0 ln 0 := 0. Particle tracks use the dot product w^T ln(r w); Gaussian
// tracks use the closed form on the position block of the moment-matched
// covariance.
inline double lmb_entropy(const LmbDensity& lmb, double hypervolume_unit,
                          EntropySign sign = EntropySign::shannon) {
  const double log_k = std::log(hypervolume_unit);
  double h = 0.0;
  for (const auto& [label, track] : lmb.tracks) {
    const double r = std::clamp(track.existence, 0.0, 1.0);
    if (r <= 0.0) continue;
    double bern = r * std::log(r);
    if (r < 1.0) bern += (1.0 - r) * std::log(1.0 - r);
    const double inner =
        is_cloud(track.state)
            ? detail::cloud_inner_product(std::get<ParticleCloud>(track.state), r, log_k)
            : detail::gaussian_inner_product(track.state, log_k, sign);
    h -= bern + r * inner;
  }
  return h;
}

}  // namespace unisat
