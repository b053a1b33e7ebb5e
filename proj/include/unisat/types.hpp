#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>

namespace unisat {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

// Kinematic state layout is [px, py, vx, vy] (meters, meters/step).
inline constexpr int kStateDim = 4;
inline constexpr int kMeasDim = 2;

// Track label: unique within a density, ordered by (birth_step, index).
struct Label {
  int birth_step = 0;
  int index = 0;
  auto operator<=>(const Label&) const = default;
};

struct Rect {
  double min_x = 0.0, min_y = 0.0;
  double max_x = 0.0, max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }

  bool contains(const Vec2& p) const {
    return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y && p.y() <= max_y;
  }

  Vec2 clamp(const Vec2& p) const {
    return {std::clamp(p.x(), min_x, max_x), std::clamp(p.y(), min_y, max_y)};
  }

  // Reflects a point back inside, mirror-style at each boundary.
  Vec2 reflect(const Vec2& p) const {
    auto fold = [](double v, double lo, double hi) {
      double span = hi - lo;
      if (span <= 0.0) return lo;
      double t = std::fmod(v - lo, 2.0 * span);
      if (t < 0.0) t += 2.0 * span;
      return t <= span ? lo + t : hi - (t - span);
    };
    return {fold(p.x(), min_x, max_x), fold(p.y(), min_y, max_y)};
  }

  bool operator==(const Rect&) const = default;
};

struct AllZeroWeights : std::runtime_error {
  AllZeroWeights() : std::runtime_error("all hypothesis weights are zero") {}
};

struct EmptyPmf : std::runtime_error {
  EmptyPmf() : std::runtime_error("cardinality pmf has no support") {}
};

struct ZeroClutterDensity : std::runtime_error {
  ZeroClutterDensity() : std::runtime_error("detection assigned with zero clutter density") {}
};

struct WaypointExhausted : std::runtime_error {
  WaypointExhausted() : std::runtime_error("action plan has no waypoint for this step") {}
};

struct NoFeasibleAssociation : std::runtime_error {
  NoFeasibleAssociation() : std::runtime_error("no association map has nonzero likelihood") {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kCodeVersion = "unisat 0.1.0";

}  // namespace unisat
