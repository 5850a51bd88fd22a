#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "pinchflow/errors.hpp"
#include "pinchflow/geodesics.hpp"

using namespace pinchflow;

namespace {

constexpr double kPi = std::numbers::pi;

// Hyperboloid model of the plane of curvature -1: X = (cosh r, sinh r cos u, sinh r sin u)
// with the Minkowski form -x0 y0 + x1 y1 + x2 y2.
using Vec3 = std::array<double, 3>;

Vec3 embed(double r, double u) {
  return {std::cosh(r), std::sinh(r) * std::cos(u), std::sinh(r) * std::sin(u)};
}

double minkowski(const Vec3& x, const Vec3& y) { return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }

double hyperbolic_distance(double r1, double u1, double r2, double u2) {
  return std::acosh(std::max(1.0, -minkowski(embed(r1, u1), embed(r2, u2))));
}

double law_of_cosines(double r1, double r2, double du) {
  return std::acosh(std::max(
      1.0, std::cosh(r1) * std::cosh(r2) - std::sinh(r1) * std::sinh(r2) * std::cos(du)));
}

// Chart components of an ambient tangent vector V at the chart point (r, u).
TangentVector chart_components(const Vec3& v, double r, double u) {
  const Vec3 er{std::sinh(r), std::cosh(r) * std::cos(u), std::cosh(r) * std::sin(u)};
  const Vec3 eu{0.0, -std::sin(u), std::cos(u)};
  return {minkowski(v, er), minkowski(v, eu) / std::sinh(r)};
}

// Terminal unit velocity of the hyperbolic geodesic from p to x.
TangentVector hyperbolic_gradient(double r0, double u0, double r, double u) {
  const Vec3 p = embed(r0, u0);
  const Vec3 x = embed(r, u);
  const double d = std::acosh(-minkowski(p, x));
  Vec3 t;
  for (int i = 0; i < 3; ++i) t[i] = (x[i] - std::cosh(d) * p[i]) / std::sinh(d);
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = std::sinh(d) * p[i] + std::cosh(d) * t[i];
  return chart_components(v, r, u);
}

SurfaceProfile tanh_pinch() {
  return SurfaceProfile::from_curvature(ProfileFamily::tanh_pinch, 1.0, 2.0, 1.0, 20.0, 1e-3);
}

}  // namespace

TEST_CASE("shooting from the pole follows a meridian") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const GeodesicArc arc = shoot(s, Pole{}, 0.7, 2.5, 0.01);
  CHECK(arc.end().r == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(arc.end().u == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("radial shooting moves along the meridian") {
  const auto s = tanh_pinch();
  const GeodesicArc arc = shoot(s, ChartPoint{1.0, 0.0}, 0.0, 0.5, 1e-3);
  CHECK(arc.end().r == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::abs(arc.end().u) < 1e-15);
}

TEST_CASE("tangential shooting matches the hyperboloid geodesic") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const double len = 1.7;
  const GeodesicArc arc = shoot(s, ChartPoint{1.0, 0.0}, kPi / 2.0, len, 1e-3);
  // gamma(s) = cosh(s) X + sinh(s) T with T = (0, 0, 1) at (r, u) = (1, 0).
  const Vec3 x = embed(1.0, 0.0);
  const Vec3 end{std::cosh(len) * x[0], std::cosh(len) * x[1], std::sinh(len)};
  CHECK(arc.end().r == doctest::Approx(std::acosh(end[0])).epsilon(1e-10));
  CHECK(arc.end().u == doctest::Approx(std::atan2(end[2], end[1])).epsilon(1e-10));
}

TEST_CASE("shot arcs have unit speed and conserve the Clairaut constant") {
  const auto s = tanh_pinch();
  for (double dir : {0.3, 1.2, 2.0, 2.9}) {
    const GeodesicArc arc = shoot(s, ChartPoint{1.3, 0.4}, dir, 2.0, 1e-3);
    const double c0 = clairaut_constant(s, arc.samples.front());
    for (const auto& st : arc.samples) {
      const double speed = metric_norm(s, st.r, {st.dr, st.du});
      CHECK(std::abs(speed - 1.0) < 1e-8);
      CHECK(std::abs(clairaut_constant(s, st) - c0) <= 1e-8 * std::max(1.0, std::abs(c0)));
    }
  }
}

TEST_CASE("shooting out of the annulus raises a range error") {
  const auto s = SurfaceProfile::constant_curvature(1.0, 3.0);
  CHECK_THROWS_AS(shoot(s, ChartPoint{2.0, 0.0}, 0.0, 2.0, 1e-2), RangeError);
  try {
    shoot(s, ChartPoint{2.0, 0.0}, 0.0, 2.0, 1e-2);
  } catch (const RangeError& e) {
    CHECK(e.exit_arclength() == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("distance special cases") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  CHECK(distance(s, Pole{}, ChartPoint{2.3, 1.0}) == 2.3);
  CHECK(distance(s, ChartPoint{1.0, 0.0}, ChartPoint{2.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  // Opposite points: the law of cosines gives acosh(cosh^2 1 + sinh^2 1) = 2 = 2 asinh(sinh 1).
  const double d = distance(s, ChartPoint{1.0, 0.0}, ChartPoint{1.0, kPi});
  CHECK(d == doctest::Approx(law_of_cosines(1.0, 1.0, kPi)).epsilon(1e-12));
  CHECK(d == doctest::Approx(2.0 * std::asinh(std::sinh(1.0))).epsilon(1e-12));
}

TEST_CASE("distance agrees with the law of cosines on random pairs") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> radius(0.01, 6.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int i = 0; i < 100; ++i) {
    const double r1 = radius(rng), r2 = radius(rng), u1 = angle(rng), u2 = angle(rng);
    const double d = distance(s, ChartPoint{r1, u1}, ChartPoint{r2, u2});
    CHECK(d == doctest::Approx(hyperbolic_distance(r1, u1, r2, u2)).epsilon(1e-7));
  }
}

TEST_CASE("distance near the pole and at nearly opposite angles") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  for (double r1 : {1e-8, 1e-5, 1e-3})
    for (double du : {1e-9, 0.5, kPi / 2.0, kPi - 1e-9, kPi})
      CHECK(distance(s, ChartPoint{r1, 0.0}, ChartPoint{0.95, du}) ==
            doctest::Approx(law_of_cosines(r1, 0.95, du)).epsilon(1e-9));
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  const auto s = tanh_pinch();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logr(std::log(1e-7), std::log(4.0));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  auto random_point = [&] { return ChartPoint{std::exp(logr(rng)), angle(rng)}; };
  for (int i = 0; i < 60; ++i) {
    const ChartPoint p = random_point(), q = random_point(), x = random_point();
    const double pq = distance(s, p, q);
    const double qp = distance(s, q, p);
    CHECK(std::abs(pq - qp) <= 1e-9 * std::max(pq, 1e-300));
    const double px = distance(s, p, x), xq = distance(s, x, q);
    CHECK(pq <= px + xq + 1e-7);
    CHECK(pq <= p.r + q.r + 1e-12);
    CHECK(pq >= std::abs(p.r - q.r) - 1e-12);
  }
}

TEST_CASE("connect reports a consistent Clairaut constant and unit velocities") {
  const auto s = tanh_pinch();
  const ChartPoint p{0.8, 0.3}, q{2.1, 2.4};
  const MinimizingGeodesic g = connect(s, p, q);
  CHECK(metric_norm(s, p.r, g.start_velocity) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(metric_norm(s, q.r, g.end_velocity) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.phi(p.r) * s.phi(p.r) * g.start_velocity.du == doctest::Approx(g.clairaut).epsilon(1e-12));
  CHECK(s.phi(q.r) * s.phi(q.r) * g.end_velocity.du == doctest::Approx(g.clairaut).epsilon(1e-9));
  // Shooting with the returned launch direction lands on q.
  const double dir = std::atan2(g.start_velocity.du * s.phi(p.r), g.start_velocity.dr);
  const GeodesicArc arc = shoot(s, p, dir, g.length, 1e-3);
  CHECK(arc.end().r == doctest::Approx(q.r).epsilon(1e-9));
  CHECK(wrap_angle(arc.end().u) == doctest::Approx(q.u).epsilon(1e-9));
}

TEST_CASE("radial gradient") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const TangentVector pole = radial_gradient(s, Pole{}, ChartPoint{1.5, 2.0});
  CHECK(pole.dr == 1.0);
  CHECK(pole.du == 0.0);
  const TangentVector same = radial_gradient(s, ChartPoint{0.5, 1.0}, ChartPoint{1.5, 1.0});
  CHECK(same.dr == doctest::Approx(1.0));
  CHECK(std::abs(same.du) < 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> radius(0.1, 3.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int i = 0; i < 20; ++i) {
    const double r0 = radius(rng), u0 = angle(rng), r = radius(rng), u = angle(rng);
    const TangentVector g = radial_gradient(s, ChartPoint{r0, u0}, ChartPoint{r, u});
    const TangentVector ref = hyperbolic_gradient(r0, u0, r, u);
    CHECK(g.dr == doctest::Approx(ref.dr).epsilon(1e-7));
    CHECK(g.du * std::sinh(r) == doctest::Approx(ref.du * std::sinh(r)).epsilon(1e-7));
    CHECK(metric_norm(s, r, g) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("distance circle curvature equals coth of the distance in the model plane") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  for (double du : {0.3, 1.5, 2.8, kPi}) {
    const ChartPoint p{1.0, 0.0}, x{2.0, du};
    const double d = distance(s, p, x);
    CHECK(distance_circle_curvature(s, p, x) == doctest::Approx(1.0 / std::tanh(d)).epsilon(1e-9));
  }
  CHECK(distance_circle_curvature(s, Pole{}, ChartPoint{1.0, 0.0}) ==
        doctest::Approx(1.0 / std::tanh(1.0)));
}

TEST_CASE("distance circle curvature on a pinched surface lies between the model bounds") {
  const auto s = tanh_pinch();
  for (double du : {0.4, 1.9, 3.0}) {
    const ChartPoint p{0.6, 0.0}, x{1.8, du};
    const double d = distance(s, p, x);
    const double k = distance_circle_curvature(s, p, x);
    CHECK(k >= 1.0 / std::tanh(d) - 1e-8);
    CHECK(k <= 2.0 / std::tanh(2.0 * d) + 1e-8);
  }
}

TEST_CASE("support function of a circle about the pole") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const DiscreteCurve c = make_initial_curve(s, CircleCurve{1.0}, 128);
  const SupportFunction f = support_function(s, Pole{}, c);
  for (double v : f.sinh_form) CHECK(v == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
  CHECK(f.min_sinh() == doctest::Approx(1.17520).epsilon(1e-5));
  for (double v : f.warp_form) CHECK(v == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
}

TEST_CASE("support function of a convex Fourier graph matches direct evaluation") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const FourierGraphCurve kind{1.5, {{2, 0.05}}, {}};
  const std::size_t n = 256;
  const DiscreteCurve c = make_initial_curve(s, kind, n);
  const SupportFunction f = support_function(s, Pole{}, c);
  double min_direct = 1e300;
  for (std::size_t j = 0; j < n; ++j) {
    const double u = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    const double r = 1.5 + 0.05 * std::cos(2.0 * u);
    const double ru = -0.1 * std::sin(2.0 * u);
    const double phi = std::sinh(r);
    const double direct = std::sinh(r) * phi / std::sqrt(ru * ru + phi * phi);
    CHECK(f.sinh_form[j] == doctest::Approx(direct).epsilon(1e-8));
    min_direct = std::min(min_direct, direct);
  }
  CHECK(f.min_sinh() > 0.0);
  CHECK(f.min_sinh() == doctest::Approx(min_direct).epsilon(1e-8));
}

TEST_CASE("support function rejects a centre outside the curve") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const DiscreteCurve c = make_initial_curve(s, CircleCurve{1.0}, 64);
  CHECK_THROWS_AS(support_function(s, ChartPoint{3.0, 0.0}, c), PreconditionError);
}

TEST_CASE("inner and outer radius of a circle about the pole") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const DiscreteCurve c = make_initial_curve(s, CircleCurve{1.0}, 128);
  const Radii r = inradius_outradius(s, c);
  CHECK(r.inner == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.outer == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(distance(s, r.inner_center, Pole{}) < 1e-4);
  CHECK(distance(s, r.outer_center, Pole{}) < 1e-4);
  CHECK(r.accuracy > 0.0);
}

TEST_CASE("inner radius does not exceed outer radius for an off-centre ellipse") {
  const auto s = tanh_pinch();
  const DiscreteCurve c = make_initial_curve(s, ChartEllipseCurve{0.9, 0.5, 0.3, 0.1}, 96);
  const Radii r = inradius_outradius(s, c);
  CHECK(r.inner <= r.outer);
  CHECK(r.inner > 0.3);
  // The inscribed ball fits: its centre lies inside and every sample is at
  // least rho_- away.
  CHECK(winding_number(c, r.inner_center) != 0);
  for (std::size_t j = 0; j < c.size(); j += 7)
    CHECK(distance(s, r.inner_center, c.point(j)) >= r.inner - r.accuracy);
}
