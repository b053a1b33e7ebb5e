#pragma once

#include <cmath>
#include <numbers>

#include "unisat/types.hpp"

namespace unisat {

// Random-walk kinematics: position carries over, velocity is not propagated.
// The transition matrix is identity on the position block and zero on the
// velocity block; process noise is what moves targets.
struct MotionModel {
  double position_noise_std = 1.0;  // m/step, per axis
  double velocity_noise_std = 0.1;  // keeps 4x4 covariances positive definite
  double survival_smc = 1.0;        // prior tracks die by weight decay, not death
  double survival_gm = 0.99;

  static Mat4 transition() {
    Mat4 f = Mat4::Zero();
    f(0, 0) = f(1, 1) = 1.0;
    return f;
  }

  static Vec4 apply(const Vec4& x) { return {x(0), x(1), 0.0, 0.0}; }

  Mat4 process_noise(double steps = 1.0) const {
    Vec4 d;
    const double p = position_noise_std * position_noise_std * steps;
    const double v = velocity_noise_std * velocity_noise_std * steps;
    d << p, p, v, v;
    return d.asDiagonal();
  }
};

// Range-limited position sensor. Detection probability is a plateau inside
// the inner radius with a linear falloff to zero at the outer radius; clutter
// is Poisson over the field-of-view disc.
struct SensorModel {
  double detection_plateau = 0.8825;
  double inner_radius = 100.0;  // m
  double outer_radius = 150.0;  // m
  double clutter_rate = 0.01;   // expected clutter points per scan
  Mat2 noise_cov = Mat2::Identity() * 4.0;

  double detection_probability(const Vec2& target_pos, const Vec2& agent_pos) const {
    const double d = (target_pos - agent_pos).norm();
    if (d <= inner_radius) return detection_plateau;
    if (d >= outer_radius) return 0.0;
    return detection_plateau * (outer_radius - d) / (outer_radius - inner_radius);
  }

  // Measurement map q: absolute target position.
  static Vec2 measure(const Vec4& state) { return state.head<2>(); }

  static Eigen::Matrix<double, 2, 4> measurement_matrix() {
    Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
    h(0, 0) = h(1, 1) = 1.0;
    return h;
  }

  double fov_area() const { return std::numbers::pi * outer_radius * outer_radius; }

  // Uniform clutter intensity over the FOV disc.
  double clutter_density() const { return clutter_rate / fov_area(); }
};

inline double log_gaussian2(const Vec2& x, const Vec2& mean, const Mat2& cov) {
  const Eigen::LLT<Mat2> llt(cov);
  const Vec2 d = x - mean;
  const Vec2 z = llt.matrixL().solve(d);
  const double log_det = 2.0 * std::log(llt.matrixL()(0, 0)) + 2.0 * std::log(llt.matrixL()(1, 1));
  return -0.5 * (z.squaredNorm() + log_det) - std::log(2.0 * std::numbers::pi);
}

}  // namespace unisat
