#include "pinchflow/geodesics.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "pinchflow/errors.hpp"
#include "pinchflow/periodic.hpp"

namespace pinchflow {

namespace {

std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTol = 1e-12;
constexpr unsigned kQuadDepth = 12;

// Boost's adaptive Gauss-Kronrod compares an error estimate taken on the
// reference interval with a tolerance scaled by the interval width, so short
// ranges recurse to full depth. Integrating over [0, 1] keeps the top level
// consistent.
double integrate_range(const auto& f, double from, double to) {
  using boost::math::quadrature::gauss_kronrod;
  const double width = to - from;
  return width * gauss_kronrod<double, 21>::integrate(
                     [&](double x) { return f(from + width * x); }, 0.0, 1.0, kQuadDepth, kQuadTol);
}

// Radial branch of a geodesic with Clairaut constant c between radii lo < hi.
// For a turning branch the root of phi = c is r0 = lo + offset, where the
// offset is a Newton correction that may be far below the spacing of doubles
// at lo; keeping it separate lets c stay exact when r1 - r0 is only a few ulps.
// Substituting r = r0 + (hi - r0) tau^2 removes the inverse square-root
// singularity at r0.
class Branch {
 public:
  Branch(const SurfaceProfile& surface, double lo, double hi, double c, bool turning)
      : surface_(surface), lo_(lo), hi_(hi), c_(c), turning_(turning) {
    if (turning_ && c_ > 0.0) {
      const WarpSample w = surface_.warp(lo_);
      gap0_ = w.phi - c_;
      offset_ = -gap0_ / w.dphi;
    }
    span_ = (hi_ - lo_) - offset_;
  }

  double radius(double tau) const { return lo_ + depth(tau); }

  // 2 span tau / sqrt(phi^2 - c^2), finite at a turning point.
  double weight(double tau, const WarpSample& w) const {
    if (c_ == 0.0) return 2.0 * span_ * tau / w.phi;
    if (turning_ && tau < 1e-5) {
      const WarpSample w0 = surface_.warp(lo_);
      return std::sqrt(2.0 * span_ / (w0.phi * w0.dphi));
    }
    double gap = w.phi - c_;
    const double d = depth(tau);
    if (turning_ && d < 0.25) {
      // phi(r) - c as (phi(lo) - c) plus an integral of phi', avoiding the
      // cancellation in phi(r) - c.
      gap = gap0_ + boost::math::quadrature::gauss<double, 7>::integrate(
                        [&](double x) { return surface_.dphi(lo_ + x); }, 0.0, d);
    }
    return 2.0 * span_ * tau / std::sqrt(gap * (w.phi + c_));
  }

  // int_lo^hi g(phi) / sqrt(phi^2 - c^2) dr. The substitution is anchored at
  // the radius where phi = c, which for a monotone branch lies at or below lo;
  // anchoring at lo instead leaves a boundary layer of width sqrt(phi(lo) - c)
  // when c is close to phi(lo). The near part [base, 2 base] carries the
  // singularity and the far part is integrated in log r so that the 1/r^2
  // decay is resolved when lo is small compared with hi.
  template <class G>
  double integrate(G&& g) const {
    const double base = turning_ ? lo_ : std::min(surface_.inverse_phi(c_), lo_);
    const double mid = base > 0.0 ? std::min(hi_, 2.0 * base) : hi_;
    double total = 0.0;
    if (mid > lo_ || (turning_ && span_ > 0.0)) {
      const Branch near(surface_, base, std::max(mid, lo_), c_, true);
      const double tau0 =
          turning_ ? 0.0 : std::sqrt(std::max(0.0, (lo_ - base - near.offset_) / near.span_));
      total = integrate_range(
          [&](double tau) {
            const WarpSample w = surface_.warp(near.radius(tau));
            return g(w) * near.weight(tau, w);
          },
          tau0, 1.0);
    }
    const double far = std::max(lo_, mid);
    if (far < hi_) {
      total += integrate_range(
          [&](double t) {
            const double r = far * std::exp(t);
            const WarpSample w = surface_.warp(r);
            return g(w) * r / std::sqrt((w.phi - c_) * (w.phi + c_));
          },
          0.0, std::log(hi_ / far));
    }
    return total;
  }

  double angle() const {
    if (c_ == 0.0 || !(span_ > 0.0)) return 0.0;
    return integrate([&](const WarpSample& w) { return c_ / w.phi; });
  }

  double length() const {
    if (!(span_ > 0.0)) return 0.0;
    if (c_ == 0.0) return hi_ - lo_;
    return integrate([&](const WarpSample& w) { return w.phi; });
  }

  // ds/dtau.
  double arclength_rate(double tau) const {
    if (c_ == 0.0) return 2.0 * span_ * tau;
    const WarpSample w = surface_.warp(radius(tau));
    return w.phi * weight(tau, w);
  }

 private:
  double depth(double tau) const { return offset_ + span_ * tau * tau; }

  const SurfaceProfile& surface_;
  double lo_;
  double hi_;
  double c_;
  bool turning_;
  double gap0_ = 0.0;   // phi(lo) - c
  double offset_ = 0.0;
  double span_ = 0.0;
};

// Geodesic family launched from radius r1 at angle theta in [0, pi] from the
// outward radial direction, towards increasing u.
struct Launch {
  double theta = 0.0;
  double c = 0.0;
  double turning = -1.0;  // r*, or -1 for a monotone branch
};

Launch make_launch(const SurfaceProfile& s, double r1, double theta) {
  Launch l;
  l.theta = theta;
  const double phi1 = s.phi(r1);
  if (theta <= 0.5 * kPi) {
    l.c = phi1 * std::sin(theta);
    return l;
  }
  if (theta >= kPi) {
    l.c = 0.0;
    l.turning = 0.0;
    return l;
  }
  l.c = phi1 * std::sin(theta);
  l.turning = std::min(s.inverse_phi(l.c), r1);
  return l;
}

// Piece of a branch between the turning radius r0 (phi(r0) = c) and r1, where
// c = phi(r1) cos(psi1). Substituting phi(r) = c sec(psi) turns the angle
// integral into int_0^psi1 dpsi / phi'(r) and the length integral into
// int_0^psi1 c sec^2(psi) / phi'(r) dpsi. Both stay accurate when psi1 is so
// small that c rounds to phi(r1). The integrands are smooth in psi, and a
// fixed rule avoids the adaptive error estimate's absolute floor on short
// intervals.
double cap_angle(const SurfaceProfile& s, double c, double psi1) {
  if (psi1 == 0.0) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate(
      [&](double psi) { return 1.0 / s.dphi(s.inverse_phi(c / std::cos(psi))); }, 0.0, psi1);
}

double cap_length(const SurfaceProfile& s, double c, double psi1) {
  if (psi1 == 0.0) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate(
      [&](double psi) {
        const double sec = 1.0 / std::cos(psi);
        return c * sec * sec / s.dphi(s.inverse_phi(c * sec));
      },
      0.0, psi1);
}

// Launch angles this close to the horizontal use the cap substitution.
constexpr double kCapWidth = 0.05;

double swept_angle(const SurfaceProfile& s, double r1, double r2, const Launch& l) {
  if (l.theta >= kPi) return kPi;
  const double e = l.theta - 0.5 * kPi;
  if (std::abs(e) < kCapWidth) {
    const double r0 = std::min(s.inverse_phi(l.c), r1);
    const double outer = Branch(s, r0, r2, l.c, true).angle();
    const double cap = cap_angle(s, l.c, std::abs(e));
    return e > 0.0 ? outer + cap : outer - cap;
  }
  if (l.turning < 0.0) return Branch(s, r1, r2, l.c, false).angle();
  return Branch(s, l.turning, r1, l.c, true).angle() + Branch(s, l.turning, r2, l.c, true).angle();
}

double swept_length(const SurfaceProfile& s, double r1, double r2, const Launch& l) {
  if (l.theta >= kPi) return r1 + r2;
  const double e = l.theta - 0.5 * kPi;
  if (std::abs(e) < kCapWidth) {
    const double r0 = std::min(s.inverse_phi(l.c), r1);
    const double outer = Branch(s, r0, r2, l.c, true).length();
    const double cap = cap_length(s, l.c, std::abs(e));
    return e > 0.0 ? outer + cap : outer - cap;
  }
  if (l.turning < 0.0) return Branch(s, r1, r2, l.c, false).length();
  return Branch(s, l.turning, r1, l.c, true).length() +
         Branch(s, l.turning, r2, l.c, true).length();
}

TangentVector negate(const TangentVector& v) { return {-v.dr, -v.du}; }

}  // namespace

double metric_norm(const SurfaceProfile& surface, double r, const TangentVector& x) {
  return std::sqrt(metric_inner(surface, r, x, x));
}

double metric_inner(const SurfaceProfile& surface, double r, const TangentVector& x,
                    const TangentVector& y) {
  const double phi = surface.phi(r);
  return x.dr * y.dr + phi * phi * x.du * y.du;
}

double clairaut_constant(const SurfaceProfile& surface, const GeodesicState& state) {
  const double phi = surface.phi(state.r);
  return phi * phi * state.du;
}

GeodesicArc shoot(const SurfaceProfile& surface, const SurfacePoint& from, double direction,
                  double length, double step) {
  if (!(length > 0.0)) throw ParameterError("geodesic length must be positive");
  if (!(step > 0.0)) throw ParameterError("geodesic step must be positive");
  GeodesicArc arc;
  arc.start = from;
  arc.length = length;
  const auto steps = static_cast<std::size_t>(std::ceil(length / step - 1e-12));
  const double h = length / static_cast<double>(steps);

  if (is_pole(from)) {
    arc.initial_velocity = {1.0, 0.0};
    if (length > surface.r_max())
      throw RangeError("radial geodesic leaves the tabulated annulus", surface.r_max());
    for (std::size_t k = 0; k <= steps; ++k) {
      const double s = h * static_cast<double>(k);
      arc.samples.push_back({s, s, direction, 1.0, 0.0});
    }
    return arc;
  }

  const ChartPoint p = std::get<ChartPoint>(from);
  if (!surface.in_annulus(p.r)) throw RangeError("geodesic start lies outside the annulus", 0.0);
  using State = std::array<double, 4>;  // r, u, r', u'
  auto rhs = [&](const State& y) -> State {
    if (!surface.in_annulus(y[0])) throw DomainError("left annulus");
    const WarpSample w = surface.warp(y[0]);
    return {y[2], y[3], w.phi * w.dphi * y[3] * y[3], -2.0 * w.dphi / w.phi * y[2] * y[3]};
  };
  State y{p.r, p.u, std::cos(direction), std::sin(direction) / surface.phi(p.r)};
  arc.initial_velocity = {y[2], y[3]};
  arc.samples.push_back({0.0, y[0], y[1], y[2], y[3]});
  for (std::size_t k = 0; k < steps; ++k) {
    const double s = h * static_cast<double>(k);
    try {
      const State k1 = rhs(y);
      State t;
      for (int i = 0; i < 4; ++i) t[i] = y[i] + 0.5 * h * k1[i];
      const State k2 = rhs(t);
      for (int i = 0; i < 4; ++i) t[i] = y[i] + 0.5 * h * k2[i];
      const State k3 = rhs(t);
      for (int i = 0; i < 4; ++i) t[i] = y[i] + h * k3[i];
      const State k4 = rhs(t);
      for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } catch (const DomainError&) {
      throw RangeError("geodesic leaves the tabulated annulus", s);
    }
    if (!surface.in_annulus(y[0])) throw RangeError("geodesic leaves the tabulated annulus", s + h);
    arc.samples.push_back({s + h, y[0], y[1], y[2], y[3]});
  }
  return arc;
}

MinimizingGeodesic connect(const SurfaceProfile& surface, const SurfacePoint& p,
                           const SurfacePoint& q) {
  MinimizingGeodesic g;
  if (is_pole(p) && is_pole(q)) return g;
  if (is_pole(p)) {
    g.length = std::get<ChartPoint>(q).r;
    g.start_velocity = {1.0, 0.0};
    g.end_velocity = {1.0, 0.0};
    return g;
  }
  if (is_pole(q)) {
    g.length = std::get<ChartPoint>(p).r;
    g.start_velocity = {-1.0, 0.0};
    g.end_velocity = {-1.0, 0.0};
    return g;
  }
  const ChartPoint a = std::get<ChartPoint>(p);
  const ChartPoint b = std::get<ChartPoint>(q);
  const double du = wrap_difference(b.u - a.u);
  const double sweep = std::abs(du);

  if (sweep < 1e-14) {
    g.length = std::abs(b.r - a.r);
    const double dir = b.r >= a.r ? 1.0 : -1.0;
    g.start_velocity = {dir, 0.0};
    g.end_velocity = {dir, 0.0};
    return g;
  }

  const bool swapped = a.r > b.r;
  const double r1 = swapped ? b.r : a.r;
  const double r2 = swapped ? a.r : b.r;
  // Angular direction of travel from the inner point to the outer one.
  const double sign = (du >= 0.0) != swapped ? 1.0 : -1.0;

  Launch launch;
  if (sweep >= kPi * (1.0 - 1e-15)) {
    launch = make_launch(surface, r1, kPi);
  } else {
    auto miss = [&](double theta) {
      return swept_angle(surface, r1, r2, make_launch(surface, r1, theta)) - sweep;
    };
    boost::uintmax_t iterations = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        miss, 0.0, kPi, -sweep, kPi - sweep, boost::math::tools::eps_tolerance<double>(50),
        iterations);
    double theta = 0.5 * (bracket.first + bracket.second);
    launch = make_launch(surface, r1, theta);
  }
  const double phi1 = surface.phi(r1);
  const double phi2 = surface.phi(r2);
  g.miss = std::abs(swept_angle(surface, r1, r2, launch) - sweep) * phi2;
  if (!(g.miss < 1e-9 * surface.r_max()))
    throw InternalError("geodesic shooting failed to converge (miss " + format_g(g.miss) +
                        ", r1=" + format_g(r1) + ", r2=" + format_g(r2) + ", du=" + format_g(sweep) +
                        ")");
  g.length = swept_length(surface, r1, r2, launch);
  g.turning_radius = launch.turning;

  const TangentVector inner_start{std::cos(launch.theta), sign * launch.c / (phi1 * phi1)};
  const double radial2 = std::sqrt(std::max(0.0, phi2 * phi2 - launch.c * launch.c)) / phi2;
  const TangentVector outer_end{radial2, sign * launch.c / (phi2 * phi2)};
  if (!swapped) {
    g.start_velocity = inner_start;
    g.end_velocity = outer_end;
  } else {
    g.start_velocity = negate(outer_end);
    g.end_velocity = negate(inner_start);
  }
  g.clairaut = (swapped ? -sign : sign) * launch.c;
  return g;
}

double distance(const SurfaceProfile& surface, const SurfacePoint& p, const SurfacePoint& q) {
  return connect(surface, p, q).length;
}

TangentVector radial_gradient(const SurfaceProfile& surface, const SurfacePoint& p0,
                              const ChartPoint& x) {
  const MinimizingGeodesic g = connect(surface, p0, x);
  if (!(g.length > 0.0)) throw DegeneracyError("radial gradient undefined at the centre point");
  return g.end_velocity;
}

double distance_circle_curvature(const SurfaceProfile& surface, const SurfacePoint& p0,
                                 const ChartPoint& x) {
  if (is_pole(p0)) return geodesic_circle_curvature(surface, x.r);
  const ChartPoint start = std::get<ChartPoint>(p0);
  const MinimizingGeodesic g = connect(surface, p0, x);
  if (!(g.length > 0.0)) throw DegeneracyError("distance circle of radius zero");
  const double c = std::abs(g.clairaut);

  // Radial branches from p0 to x.
  std::vector<std::pair<double, double>> legs;
  if (g.turning_radius >= 0.0) {
    legs.emplace_back(start.r, g.turning_radius);
    legs.emplace_back(g.turning_radius, x.r);
  } else {
    legs.emplace_back(start.r, x.r);
  }

  using State = std::array<double, 2>;  // J, J'
  State y{0.0, 1.0};
  boost::numeric::odeint::runge_kutta_dopri5<State> stepper;
  for (const auto& [from, to] : legs) {
    if (from == to) continue;
    const double lo = std::min(from, to);
    const double hi = std::max(from, to);
    const bool turning = g.turning_radius >= 0.0 && lo == g.turning_radius;
    const Branch branch(surface, lo, hi, c, turning);
    const bool rising = to > from;
    auto system = [&](const State& state, State& dstate, double sigma) {
      const double tau = rising ? sigma : 1.0 - sigma;
      const double rate = branch.arclength_rate(tau);
      const double k = surface.gauss_curvature(branch.radius(tau));
      dstate[0] = state[1] * rate;
      dstate[1] = -k * state[0] * rate;
    };
    boost::numeric::odeint::integrate_adaptive(
        boost::numeric::odeint::make_controlled(1e-13, 1e-13, stepper), system, y, 0.0, 1.0,
        1e-3);
  }
  if (!(y[0] > 0.0)) throw InternalError("Jacobi field vanished along a minimising geodesic");
  return y[1] / y[0];
}

double SupportFunction::min_sinh() const {
  return *std::min_element(sinh_form.begin(), sinh_form.end());
}
double SupportFunction::max_sinh() const {
  return *std::max_element(sinh_form.begin(), sinh_form.end());
}

SupportFunction support_function(const SurfaceProfile& surface, const SurfacePoint& p0,
                                 const DiscreteCurve& curve) {
  if (winding_number(curve, p0) == 0)
    throw PreconditionError("support function centre must lie inside the curve");
  SupportFunction out;
  out.sinh_form.resize(curve.size());
  out.warp_form.resize(curve.size());
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const ChartPoint x = curve.point(j);
    double dist;
    TangentVector grad;
    if (is_pole(p0)) {
      dist = x.r;
      grad = {1.0, 0.0};
    } else {
      const MinimizingGeodesic g = connect(surface, p0, x);
      dist = g.length;
      grad = g.end_velocity;
      if (!(dist > 0.0)) throw PreconditionError("support function centre lies on the curve");
    }
    const double ip = metric_inner(surface, x.r, grad, curve.normal(j));
    out.sinh_form[j] = std::sinh(dist) * ip;
    out.warp_form[j] = surface.phi(dist) * ip;
  }
  return out;
}

namespace {

SurfacePoint from_xy(double x, double y) {
  const double r = std::hypot(x, y);
  if (r < 1e-12) return Pole{};
  return ChartPoint{r, std::atan2(y, x)};
}

// Extremum of sampled periodic data refined by a parabola through the neighbours.
double refined_extremum(const std::vector<double>& d, bool maximum) {
  const std::size_t n = d.size();
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (maximum ? d[j] > d[best] : d[j] < d[best]) best = j;
  }
  const double dm = d[(best + n - 1) % n];
  const double d0 = d[best];
  const double dp = d[(best + 1) % n];
  const double curv = dp - 2.0 * d0 + dm;
  if (maximum ? curv >= 0.0 : curv <= 0.0) return d0;
  const double vertex = d0 - (dp - dm) * (dp - dm) / (8.0 * curv);
  return maximum ? std::max(vertex, d0) : std::min(vertex, d0);
}

struct NelderMead {
  struct Vertex {
    double x, y, f;
  };

  template <class F>
  static std::pair<Vertex, double> minimise(F&& f, Vertex v0, double hx, double hy, int budget,
                                            int& used) {
    std::array<Vertex, 3> s{v0, Vertex{v0.x + hx, v0.y, 0.0}, Vertex{v0.x, v0.y + hy, 0.0}};
    s[1].f = f(s[1].x, s[1].y);
    s[2].f = f(s[2].x, s[2].y);
    used += 2;
    auto sort = [&] { std::sort(s.begin(), s.end(), [](auto& l, auto& r) { return l.f < r.f; }); };
    while (used < budget) {
      sort();
      const double cx = 0.5 * (s[0].x + s[1].x), cy = 0.5 * (s[0].y + s[1].y);
      auto at = [&](double t) {
        Vertex v{cx + t * (s[2].x - cx), cy + t * (s[2].y - cy), 0.0};
        v.f = f(v.x, v.y);
        ++used;
        return v;
      };
      const Vertex refl = at(-1.0);
      if (refl.f < s[0].f) {
        const Vertex exp = at(-2.0);
        s[2] = exp.f < refl.f ? exp : refl;
      } else if (refl.f < s[1].f) {
        s[2] = refl;
      } else {
        const Vertex con = refl.f < s[2].f ? at(-0.5) : at(0.5);
        if (con.f < std::min(refl.f, s[2].f)) {
          s[2] = con;
        } else {
          for (int i = 1; i < 3; ++i) {
            s[i].x = s[0].x + 0.5 * (s[i].x - s[0].x);
            s[i].y = s[0].y + 0.5 * (s[i].y - s[0].y);
            s[i].f = f(s[i].x, s[i].y);
            ++used;
          }
        }
      }
      const double size = std::max({std::hypot(s[1].x - s[0].x, s[1].y - s[0].y),
                                    std::hypot(s[2].x - s[0].x, s[2].y - s[0].y)});
      if (size < 1e-9) break;
    }
    sort();
    double spread = 0.0;
    for (const auto& v : s) {
      if (std::isfinite(v.f)) spread = std::max(spread, std::abs(v.f - s[0].f));
    }
    return {s[0], spread};
  }
};

}  // namespace

Radii inradius_outradius(const SurfaceProfile& surface, const DiscreteCurve& curve,
                         const RadiiSearch& search) {
  if (!is_embedded(curve)) throw PreconditionError("radii need an embedded curve");
  if (search.grid < 2 || search.budget < 10) throw ParameterError("radii search too coarse");

  // Working copy of the curve with at most max_curve_samples points.
  const std::size_t n = curve.size();
  std::vector<ChartPoint> pts;
  if (n <= search.max_curve_samples) {
    for (std::size_t j = 0; j < n; ++j) pts.push_back(curve.point(j));
  } else {
    const double two_pi = 2.0 * kPi;
    std::vector<double> periodic_u(n);
    for (std::size_t j = 0; j < n; ++j)
      periodic_u[j] = curve.u()[j] - curve.turns() * curve.parameter_step() * static_cast<double>(j);
    const periodic::PeriodicSpline rs(std::vector<double>(curve.r().begin(), curve.r().end()),
                                      two_pi);
    const periodic::PeriodicSpline us(std::move(periodic_u), two_pi);
    const std::size_t m = search.max_curve_samples;
    for (std::size_t k = 0; k < m; ++k) {
      const double p = two_pi * static_cast<double>(k) / static_cast<double>(m);
      pts.push_back({rs(p), wrap_angle(us(p) + curve.turns() * p)});
    }
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& p : pts) {
    const ChartXY q = to_xy(p);
    xmin = std::min(xmin, q.x);
    xmax = std::max(xmax, q.x);
    ymin = std::min(ymin, q.y);
    ymax = std::max(ymax, q.y);
  }

  Radii out;
  auto inside = [&](double x, double y) { return winding_number(curve, from_xy(x, y)) != 0; };
  std::vector<double> d(pts.size());
  auto distances = [&](double x, double y) {
    const SurfacePoint c = from_xy(x, y);
    d.resize(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) d[j] = distance(surface, c, pts[j]);
    ++out.evaluations;
  };
  // The grid phase only ranks candidates, so a third of the samples suffice.
  const std::size_t stride = pts.size() >= 48 ? 3 : 1;
  auto coarse_distances = [&](double x, double y) {
    const SurfacePoint c = from_xy(x, y);
    d.assign((pts.size() + stride - 1) / stride, 0.0);
    for (std::size_t j = 0, k = 0; j < pts.size(); j += stride, ++k) d[k] = distance(surface, c, pts[j]);
    ++out.evaluations;
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto neg_inner = [&](double x, double y) {
    if (!inside(x, y)) return kInf;
    distances(x, y);
    return -refined_extremum(d, false);
  };
  auto outer = [&](double x, double y) {
    if (!inside(x, y)) return kInf;
    distances(x, y);
    return refined_extremum(d, true);
  };

  const double hx = (xmax - xmin) / search.grid;
  const double hy = (ymax - ymin) / search.grid;
  NelderMead::Vertex best_in{0, 0, kInf}, best_out{0, 0, kInf};
  for (int i = 0; i < search.grid; ++i) {
    for (int k = 0; k < search.grid; ++k) {
      const double x = xmin + (i + 0.5) * hx;
      const double y = ymin + (k + 0.5) * hy;
      if (!inside(x, y)) continue;
      coarse_distances(x, y);
      const double fi = -refined_extremum(d, false);
      const double fo = refined_extremum(d, true);
      if (fi < best_in.f) best_in = {x, y, fi};
      if (fo < best_out.f) best_out = {x, y, fo};
    }
  }
  if (!std::isfinite(best_in.f))
    throw PreconditionError("no chart grid point lies inside the curve");

  int used_in = 0, used_out = 0;
  const auto [vin, spread_in] = NelderMead::minimise(neg_inner, best_in, hx, hy, search.budget, used_in);
  const auto [vout, spread_out] = NelderMead::minimise(outer, best_out, hx, hy, search.budget, used_out);

  out.inner = -vin.f;
  out.outer = vout.f;
  out.inner_center = from_xy(vin.x, vin.y);
  out.outer_center = from_xy(vout.x, vout.y);

  // Chord sagitta of the sampled curve bounds the sampling error of the extrema.
  double sagitta = 0.0;
  const double kmax = std::max(std::abs(curve.kappa_max()), std::abs(curve.kappa_min()));
  const double seg = [&] {
    double m = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j)
      m = std::max(m, distance(surface, pts[j], pts[(j + 1) % pts.size()]));
    return m;
  }();
  sagitta = seg * seg * kmax / 8.0;
  out.accuracy = std::max({spread_in, spread_out, sagitta, 1e-9});
  return out;
}

}  // namespace pinchflow
