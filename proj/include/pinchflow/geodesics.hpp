#pragma once

#include <vector>

#include "pinchflow/chart.hpp"
#include "pinchflow/curve.hpp"
#include "pinchflow/surface.hpp"

namespace pinchflow {

/// |X|_g at radius r.
double metric_norm(const SurfaceProfile& surface, double r, const TangentVector& x);
/// <X, Y>_g at radius r.
double metric_inner(const SurfaceProfile& surface, double r, const TangentVector& x,
                    const TangentVector& y);

struct GeodesicState {
  double s = 0.0;
  double r = 0.0;
  double u = 0.0;  // unwrapped
  double dr = 0.0;
  double du = 0.0;
};

/// Unit-speed geodesic sampled at every integration step.
struct GeodesicArc {
  SurfacePoint start;
  TangentVector initial_velocity;
  double length = 0.0;
  std::vector<GeodesicState> samples;

  const GeodesicState& end() const { return samples.back(); }
};

/// Clairaut invariant phi(r)^2 u' of a geodesic state.
double clairaut_constant(const SurfaceProfile& surface, const GeodesicState& state);

/// Integrates r'' = phi phi' u'^2, u'' = -2 (phi'/phi) r' u' with fixed-step RK4.
/// At a chart point, `direction` is the angle from d/dr towards the unit
/// d/du / phi; from the pole it is the angle u of the outgoing ray (closed form).
/// Throws RangeError carrying the exit arclength if the arc leaves the annulus.
GeodesicArc shoot(const SurfaceProfile& surface, const SurfacePoint& from, double direction,
                  double length, double step);

/// Minimising geodesic between two points, computed by shooting on the launch
/// angle. The terminal point of a launch is found from the Clairaut relation
/// (quadrature of du/dr along the radial branches) and the angle is bracketed
/// on [0, pi], where the swept angle is monotone.
struct MinimizingGeodesic {
  double length = 0.0;
  double clairaut = 0.0;        // phi^2 u' along the arc (signed)
  TangentVector start_velocity; // unit, at p
  TangentVector end_velocity;   // unit, at q
  double miss = 0.0;            // terminal angular miss scaled by phi(r_q)
  // Path description: radial branches traversed from p to q.
  double turning_radius = -1.0; // r* where phi(r*) = |c| if the arc turns, else -1
};

MinimizingGeodesic connect(const SurfaceProfile& surface, const SurfacePoint& p,
                           const SurfacePoint& q);

double distance(const SurfaceProfile& surface, const SurfacePoint& p, const SurfacePoint& q);

/// Gradient of dist(p0, .) at x: the terminal unit velocity of the minimising geodesic.
TangentVector radial_gradient(const SurfaceProfile& surface, const SurfacePoint& p0,
                              const ChartPoint& x);

/// Geodesic curvature at x of the distance circle about p0 through x, i.e.
/// Hess r_{p0}(U, U) for the unit U orthogonal to the radial gradient. About
/// the pole this is phi'/phi; otherwise J'/J for the Jacobi field J'' + K J = 0,
/// J(0) = 0, J'(0) = 1 along the minimising geodesic.
double distance_circle_curvature(const SurfaceProfile& surface, const SurfacePoint& p0,
                                 const ChartPoint& x);

struct SupportFunction {
  std::vector<double> sinh_form;  // sinh(r_{p0}) <d_r, N>
  std::vector<double> warp_form;  // phi(r_{p0}) <d_r, N>
  double min_sinh() const;
  double max_sinh() const;
};

/// Throws PreconditionError unless p0 lies strictly inside the curve.
SupportFunction support_function(const SurfaceProfile& surface, const SurfacePoint& p0,
                                 const DiscreteCurve& curve);

struct RadiiSearch {
  int grid = 16;
  int budget = 200;
  std::size_t max_curve_samples = 96;
};

struct Radii {
  double inner = 0.0;
  double outer = 0.0;
  SurfacePoint inner_center;
  SurfacePoint outer_center;
  double accuracy = 0.0;  // estimated absolute accuracy of both radii
  int evaluations = 0;
};

/// Inner radius (largest inscribed geodesic ball) and outer radius (smallest
/// enclosing ball). Chart grid over the curve's bounding box followed by
/// Nelder-Mead refinement. Deterministic.
Radii inradius_outradius(const SurfaceProfile& surface, const DiscreteCurve& curve,
                         const RadiiSearch& search = {});

}  // namespace pinchflow
