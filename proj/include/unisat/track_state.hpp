#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "unisat/types.hpp"

namespace unisat {

// Particle representation of a single track's kinematic density.
// Columns of `states` are particles; `weights` sums to 1.
struct ParticleCloud {
  Eigen::Matrix<double, kStateDim, Eigen::Dynamic> states;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(states.cols()); }

  bool operator==(const ParticleCloud& o) const {
    return states.rows() == o.states.rows() && states.cols() == o.states.cols() &&
           states == o.states && weights == o.weights;
  }
};

struct GaussianComponent {
  double weight = 1.0;
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Identity();

  bool operator==(const GaussianComponent& o) const {
    return weight == o.weight && mean == o.mean && cov == o.cov;
  }
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;

  bool operator==(const GaussianMixture& o) const { return components == o.components; }
};

// A track state is either a particle cloud (search phase) or a Gaussian
// mixture (track phase).
using TrackState = std::variant<ParticleCloud, GaussianMixture>;

inline bool is_cloud(const TrackState& s) { return std::holds_alternative<ParticleCloud>(s); }

inline Vec4 mean_state(const ParticleCloud& c) { return c.states * c.weights; }

inline Vec4 mean_state(const GaussianMixture& g) {
  Vec4 m = Vec4::Zero();
  for (const auto& comp : g.components) m += comp.weight * comp.mean;
  return m;
}

inline Vec4 mean_state(const TrackState& s) {
  return std::visit([](const auto& v) { return mean_state(v); }, s);
}

inline Mat4 covariance(const ParticleCloud& c) {
  const Vec4 m = mean_state(c);
  Mat4 cov = Mat4::Zero();
  for (int i = 0; i < c.size(); ++i) {
    const Vec4 d = c.states.col(i) - m;
    cov += c.weights(i) * (d * d.transpose());
  }
  return cov;
}

// Moment-matched covariance of the whole mixture (spread-of-means included).
inline Mat4 covariance(const GaussianMixture& g) {
  const Vec4 m = mean_state(g);
  Mat4 cov = Mat4::Zero();
  for (const auto& comp : g.components) {
    const Vec4 d = comp.mean - m;
    cov += comp.weight * (comp.cov + d * d.transpose());
  }
  return cov;
}

inline Mat4 covariance(const TrackState& s) {
  return std::visit([](const auto& v) { return covariance(v); }, s);
}

// Degenerate covariances (condition number above 1e12) get eps*I added,
// eps = 1e-8 * trace / dim, which keeps log-determinants finite.
template <int N>
inline Eigen::Matrix<double, N, N> regularize_covariance(Eigen::Matrix<double, N, N> cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(cov);
  const auto& ev = es.eigenvalues();
  const double lo = ev(0);
  const double hi = ev(N - 1);
  if (lo <= 0.0 || hi / lo > 1e12) {
    const double eps = 1e-8 * cov.trace() / N;
    cov += eps * Eigen::Matrix<double, N, N>::Identity();
  }
  return cov;
}

// Single-Gaussian moment match of a particle cloud.
inline GaussianComponent moment_match(const ParticleCloud& c) {
  GaussianComponent g;
  g.weight = 1.0;
  g.mean = mean_state(c);
  g.cov = regularize_covariance<4>(covariance(c));
  return g;
}

inline double position_covariance_trace(const TrackState& s) {
  return covariance(s).topLeftCorner<2, 2>().trace();
}

}  // namespace unisat
