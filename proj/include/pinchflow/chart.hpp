#pragma once

#include <cmath>
#include <numbers>
#include <variant>

namespace pinchflow {

/// Geodesic polar coordinates (r, u) about the pole. r is strictly positive;
/// the pole itself is the separate `Pole` tag.
struct ChartPoint {
  double r = 1.0;
  double u = 0.0;
};

struct Pole {};

using SurfacePoint = std::variant<Pole, ChartPoint>;

inline bool is_pole(const SurfacePoint& p) { return std::holds_alternative<Pole>(p); }

/// Coordinate components of a tangent vector in the (r, u) chart. The metric is
/// dr^2 + phi(r)^2 du^2, so |X|^2 = dr^2 + phi^2 du^2.
struct TangentVector {
  double dr = 0.0;
  double du = 0.0;
};

inline double wrap_angle(double u) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(u, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

/// Representative of an angle difference in (-pi, pi].
inline double wrap_difference(double du) {
  constexpr double pi = std::numbers::pi;
  double w = std::remainder(du, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

/// Chart rendering (x, y) = (r cos u, r sin u). Not an isometry.
struct ChartXY {
  double x = 0.0;
  double y = 0.0;
};

inline ChartXY to_xy(const ChartPoint& p) { return {p.r * std::cos(p.u), p.r * std::sin(p.u)}; }

}  // namespace pinchflow
