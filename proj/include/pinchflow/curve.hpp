#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pinchflow/chart.hpp"
#include "pinchflow/surface.hpp"

namespace pinchflow {

inline constexpr std::size_t kMinCurveSamples = 16;

/// Closed curve sampled at N equally spaced parameter values p_j = 2 pi j / N
/// in the polar chart. Angles are stored unwrapped (monotone lift), so
/// u_{j+N} = u_j + 2 pi * turns(). Geometry (speed, frame, geodesic curvature,
/// arclength weights) is computed once at construction with periodic
/// fourth-order differences in p.
///
/// Sign convention: N is the right-hand normal of the direction of travel,
/// which is the outward normal for counterclockwise curves, and kappa is
/// measured against -N. A counterclockwise geodesic circle about the pole has
/// N = d/dr and kappa = phi'/phi > 0; reversing the orientation flips kappa.
class DiscreteCurve {
 public:
  /// `u` may be given wrapped or unwrapped; consecutive samples must differ by
  /// less than pi in angle. Throws ParameterError / DegeneracyError on invalid data.
  static DiscreteCurve from_samples(const SurfaceProfile& surface, std::vector<double> r,
                                    std::vector<double> u);

  std::size_t size() const noexcept { return r_.size(); }
  double parameter_step() const noexcept { return dp_; }
  int turns() const noexcept { return turns_; }
  bool counterclockwise() const noexcept { return ccw_; }

  std::span<const double> r() const noexcept { return r_; }
  /// Unwrapped angles.
  std::span<const double> u() const noexcept { return u_; }
  ChartPoint point(std::size_t j) const { return {r_[j], wrap_angle(u_[j])}; }

  std::span<const double> r_dot() const noexcept { return r_dot_; }
  std::span<const double> u_dot() const noexcept { return u_dot_; }
  std::span<const double> speed() const noexcept { return speed_; }
  std::span<const double> curvature() const noexcept { return kappa_; }
  /// Trapezoidal arclength weights v_j dp.
  std::span<const double> ds() const noexcept { return ds_; }
  std::span<const double> phi() const noexcept { return phi_; }

  TangentVector tangent(std::size_t j) const;
  TangentVector normal(std::size_t j) const;

  double kappa_min() const;
  double kappa_max() const;

 private:
  DiscreteCurve() = default;

  std::vector<double> r_, u_;
  double dp_ = 0.0;
  int turns_ = 0;
  bool ccw_ = true;
  std::vector<double> r_dot_, u_dot_, speed_, kappa_, ds_, phi_;
};

/// Star-shaped curve about the pole written as r = r(u) on the uniform grid u_j = 2 pi j / N.
class RadialGraph {
 public:
  explicit RadialGraph(std::vector<double> values);

  std::size_t size() const noexcept { return r_.size(); }
  std::span<const double> r() const noexcept { return r_; }
  double spacing() const noexcept;
  double mean_radius() const;

  /// Lossless conversion: parameter p = u.
  DiscreteCurve to_curve(const SurfaceProfile& surface) const;

 private:
  std::vector<double> r_;
};

/// Quasilinear graph form kappa = -(phi/v^3) r_uu + (phi'/v)(1 + r_u^2/v^2), v = sqrt(r_u^2 + phi^2).
std::vector<double> graph_curvature(const SurfaceProfile& surface, const RadialGraph& graph);

struct LengthArea {
  double length = 0.0;
  double area = 0.0;
};

/// L = sum v_j dp and A = sum Phi(r_j) u'_j dp (signed; positive counterclockwise).
LengthArea length_area(const SurfaceProfile& surface, const DiscreteCurve& curve);

/// Integral of -K over the enclosed region, by Stokes with the radial primitive
/// int_0^r K phi = 1 - phi'(r).
double enclosed_negative_curvature(const SurfaceProfile& surface, const DiscreteCurve& curve);

/// sum kappa ds - 2 pi (orientation) - int_Omega (-K) dA.
double gauss_bonnet_residual(const SurfaceProfile& surface, const DiscreteCurve& curve);

/// Resamples to uniform arclength with periodic cubic splines of (r, u - turns*p).
DiscreteCurve redistribute(const SurfaceProfile& surface, const DiscreteCurve& curve);

/// Self-intersection test of the chart polygon.
bool is_embedded(const DiscreteCurve& curve);

/// Winding number of the chart polygon around the chart image of `point`
/// (the pole when the variant holds Pole).
int winding_number(const DiscreteCurve& curve, const SurfacePoint& point);

struct Convexity {
  double kappa_min = 0.0;
  bool convex = false;
};
Convexity convexity(const DiscreteCurve& curve);

// Initial curves ------------------------------------------------------------

struct CircleCurve {
  double radius = 1.0;
};
/// r(u) = radius + amplitude * cos(mode * u).
struct PerturbedCircleCurve {
  double radius = 1.0;
  int mode = 2;
  double amplitude = 1e-3;
};
/// r(u) = c0 + sum_k (cos_k cos(k u) + sin_k sin(k u)).
struct FourierGraphCurve {
  double c0 = 1.0;
  std::map<int, double> cos_terms;
  std::map<int, double> sin_terms;
};
/// Ellipse drawn in the chart plane (x, y) = (r cos u, r sin u).
struct ChartEllipseCurve {
  double semi_x = 1.0;
  double semi_y = 0.5;
  double center_x = 0.0;
  double center_y = 0.0;
};

using InitialCurve =
    std::variant<CircleCurve, PerturbedCircleCurve, FourierGraphCurve, ChartEllipseCurve>;

bool is_graph_kind(const InitialCurve& kind);

/// Radial-graph initial data; throws ParameterError for chart ellipses or if
/// the graph leaves the annulus.
RadialGraph make_initial_graph(const SurfaceProfile& surface, const InitialCurve& kind,
                               std::size_t n);

DiscreteCurve make_initial_curve(const SurfaceProfile& surface, const InitialCurve& kind,
                                 std::size_t n);

}  // namespace pinchflow
