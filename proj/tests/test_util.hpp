#pragma once

// Shared helpers for building densities in tests.

#include <memory>
#include <vector>

#include "unisat/glmb.hpp"
#include "unisat/rng.hpp"

namespace unisat::testing {

inline ParticleCloud make_cloud(const std::vector<Vec4>& states,
                                const std::vector<double>& weights = {}) {
  ParticleCloud c;
  c.states.resize(kStateDim, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) c.states.col(static_cast<Eigen::Index>(i)) = states[i];
  if (weights.empty()) {
    c.weights.setConstant(static_cast<Eigen::Index>(states.size()), 1.0 / static_cast<double>(states.size()));
  } else {
    c.weights.resize(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t i = 0; i < weights.size(); ++i) c.weights(static_cast<Eigen::Index>(i)) = weights[i];
  }
  return c;
}

inline Vec4 state_at(double x, double y, double vx = 0.0, double vy = 0.0) {
  return Vec4(x, y, vx, vy);
}

inline GaussianMixture make_gaussian(const Vec4& mean, const Mat4& cov) {
  GaussianMixture g;
  g.components.push_back(GaussianComponent{1.0, mean, cov});
  return g;
}

inline GaussianMixture make_gaussian_at(double x, double y, double pos_var = 25.0) {
  Vec4 d;
  d << pos_var, pos_var, 0.1, 0.1;
  return make_gaussian(state_at(x, y), Mat4(d.asDiagonal()));
}

inline int add_track(GlmbDensity& density, Label label, TrackState state) {
  density.table.push_back(Track{label, std::make_shared<TrackState>(std::move(state))});
  return static_cast<int>(density.table.size()) - 1;
}

inline void add_hypothesis(GlmbDensity& density, std::vector<int> tracks, double weight) {
  std::sort(tracks.begin(), tracks.end());
  density.hypotheses.push_back(Hypothesis{std::move(tracks), weight});
}

// Random GLMB over n_labels labels with one shared history per label.
inline GlmbDensity random_density(Rng& rng, int n_labels, int n_hypotheses,
                                  bool gaussian_tracks = false) {
  GlmbDensity d;
  for (int i = 0; i < n_labels; ++i) {
    if (gaussian_tracks) {
      add_track(d, Label{0, i},
                make_gaussian_at(rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0),
                                 rng.uniform(1.0, 50.0)));
    } else {
      std::vector<Vec4> pts;
      for (int p = 0; p < 20; ++p) {
        pts.push_back(state_at(rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)));
      }
      add_track(d, Label{0, i}, make_cloud(pts));
    }
  }
  for (int h = 0; h < n_hypotheses; ++h) {
    std::vector<int> tracks;
    for (int i = 0; i < n_labels; ++i) {
      if (rng.uniform() < 0.5) tracks.push_back(i);
    }
    add_hypothesis(d, std::move(tracks), rng.uniform(0.1, 1.0));
  }
  return normalize_hypotheses(merge_duplicate_hypotheses(std::move(d)));
}

}  // namespace unisat::testing
