#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pinchflow/curve.hpp"
#include "pinchflow/errors.hpp"

using namespace pinchflow;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> grid(std::size_t n) {
  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
  return u;
}

// r(u) = 1.5 + 0.05 cos 2u with its exact derivatives.
struct TestGraph {
  double r(double u) const { return 1.5 + 0.05 * std::cos(2.0 * u); }
  double ru(double u) const { return -0.1 * std::sin(2.0 * u); }
  double ruu(double u) const { return -0.2 * std::cos(2.0 * u); }
};

// Graph curvature from exact derivatives on the model plane phi = sinh.
double exact_graph_curvature(double u) {
  const TestGraph g;
  const double r = g.r(u), ru = g.ru(u), ruu = g.ruu(u);
  const double phi = std::sinh(r), dphi = std::cosh(r);
  const double v = std::sqrt(ru * ru + phi * phi);
  return -(phi / (v * v * v)) * ruu + (dphi / v) * (1.0 + ru * ru / (v * v));
}

DiscreteCurve test_graph_curve(const SurfaceProfile& s, std::size_t n) {
  return make_initial_curve(s, FourierGraphCurve{1.5, {{2, 0.05}}, {}}, n);
}

}  // namespace

TEST_CASE("geodesic circle has constant curvature coth(r)") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const DiscreteCurve c = make_initial_curve(s, CircleCurve{1.0}, 256);
  CHECK(c.counterclockwise());
  CHECK(c.turns() == 1);
  for (double k : c.curvature()) CHECK(k == doctest::Approx(1.0 / std::tanh(1.0)).epsilon(1e-12));
  CHECK(c.kappa_min() == doctest::Approx(1.31304).epsilon(1e-5));
  CHECK(c.kappa_max() - c.kappa_min() < 1e-9);
  // Outward normal is d/dr.
  const TangentVector n = c.normal(17);
  CHECK(n.dr == doctest::Approx(1.0));
  CHECK(std::abs(n.du) < 1e-14);
}

TEST_CASE("frame is g-orthonormal") {
  const auto s = SurfaceProfile::from_curvature(ProfileFamily::tanh_pinch, 1.0, 2.0, 1.0, 20.0, 1e-3);
  const DiscreteCurve c = make_initial_curve(s, ChartEllipseCurve{1.2, 0.7, 0.2, -0.1}, 128);
  for (std::size_t j = 0; j < c.size(); ++j) {
    const TangentVector t = c.tangent(j), n = c.normal(j);
    const double phi = s.phi(c.r()[j]);
    auto inner = [&](const TangentVector& x, const TangentVector& y) {
      return x.dr * y.dr + phi * phi * x.du * y.du;
    };
    CHECK(inner(t, t) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(inner(n, n) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(inner(t, n)) < 1e-10);
  }
}

TEST_CASE("reversing the orientation flips the curvature and the area") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const std::size_t n = 64;
  const TestGraph g;
  std::vector<double> r, u, rr, ur;
  for (double uj : grid(n)) {
    r.push_back(g.r(uj));
    u.push_back(uj);
    rr.push_back(g.r(-uj));
    ur.push_back(-uj);
  }
  const DiscreteCurve ccw = DiscreteCurve::from_samples(s, r, u);
  const DiscreteCurve cw = DiscreteCurve::from_samples(s, rr, ur);
  CHECK_FALSE(cw.counterclockwise());
  CHECK(cw.turns() == -1);
  // Sample j of cw is the point at angle -u_j, which is sample (n - j) mod n of ccw.
  for (std::size_t j = 0; j < n; ++j)
    CHECK(cw.curvature()[j] == doctest::Approx(-ccw.curvature()[(n - j) % n]).epsilon(1e-12));
  const LengthArea a = length_area(s, ccw), b = length_area(s, cw);
  CHECK(b.length == doctest::Approx(a.length).epsilon(1e-13));
  CHECK(b.area == doctest::Approx(-a.area).epsilon(1e-13));
}

TEST_CASE("length and area of a geodesic circle") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const DiscreteCurve c = make_initial_curve(s, CircleCurve{1.0}, 128);
  const LengthArea la = length_area(s, c);
  CHECK(la.length == doctest::Approx(2.0 * kPi * std::sinh(1.0)).epsilon(1e-13));
  CHECK(la.area == doctest::Approx(2.0 * kPi * (std::cosh(1.0) - 1.0)).epsilon(1e-13));

  std::vector<double> r(128, 1.0), u = grid(128);
  for (double& x : u) x = -x;
  const LengthArea cw = length_area(s, DiscreteCurve::from_samples(s, r, u));
  CHECK(cw.area == doctest::Approx(-la.area).epsilon(1e-13));
}

TEST_CASE("area of a curve not enclosing the pole is still correct") {
  // A geodesic circle about an off-pole point of the model plane has the same
  // length and area as one about the pole. The circle of radius rho about
  // (d, 0) is traced with the hyperboloid model. The speed comes from the
  // fourth-order stencil, so L and A converge at that order here.
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const double d = 2.0, rho = 0.5;
  auto circle = [&](std::size_t n) {
    std::vector<double> r, u;
    for (double t : grid(n)) {
      const double x0 = std::cosh(d) * std::cosh(rho) + std::sinh(d) * std::sinh(rho) * std::cos(t);
      const double x1 = std::sinh(d) * std::cosh(rho) + std::cosh(d) * std::sinh(rho) * std::cos(t);
      const double x2 = std::sinh(rho) * std::sin(t);
      r.push_back(std::acosh(x0));
      u.push_back(std::atan2(x2, x1));
    }
    return DiscreteCurve::from_samples(s, r, u);
  };
  const double area = 2.0 * kPi * (std::cosh(rho) - 1.0);
  const double length = 2.0 * kPi * std::sinh(rho);

  const DiscreteCurve c = circle(256);
  CHECK(c.turns() == 0);
  CHECK(winding_number(c, Pole{}) == 0);
  CHECK(winding_number(c, ChartPoint{d, 0.0}) == 1);
  const LengthArea la = length_area(s, c);
  CHECK(la.area == doctest::Approx(area).epsilon(1e-7));
  CHECK(la.length == doctest::Approx(length).epsilon(1e-7));
  for (double k : c.curvature()) CHECK(k == doctest::Approx(1.0 / std::tanh(rho)).epsilon(1e-6));

  const LengthArea coarse = length_area(s, circle(128));
  CHECK(std::log2(std::abs(coarse.area - area) / std::abs(la.area - area)) >= 3.5);
  CHECK(std::log2(std::abs(coarse.length - length) / std::abs(la.length - length)) >= 3.5);
}

TEST_CASE("length dominates a times area on pinched profiles") {
  for (auto family : {ProfileFamily::tanh_pinch, ProfileFamily::rational_pinch}) {
    const auto s = SurfaceProfile::from_curvature(family, 1.0, 2.0, 1.0, 20.0, 1e-3);
    for (const InitialCurve& kind :
         {InitialCurve{CircleCurve{3.0}}, InitialCurve{ChartEllipseCurve{2.0, 0.5, 0.3, 0.0}},
          InitialCurve{FourierGraphCurve{1.0, {{3, 0.2}}, {{1, 0.1}}}}}) {
      const LengthArea la = length_area(s, make_initial_curve(s, kind, 256));
      CHECK(la.length >= s.a() * la.area);
    }
  }
}

TEST_CASE("Gauss-Bonnet residual vanishes on a circle and converges at fourth order") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  CHECK(std::abs(gauss_bonnet_residual(s, make_initial_curve(s, CircleCurve{1.0}, 64))) < 1e-12);

  const double e1 = std::abs(gauss_bonnet_residual(s, make_initial_curve(s, ChartEllipseCurve{1.0, 0.6, 0.1, 0.0}, 32)));
  const double e2 = std::abs(gauss_bonnet_residual(s, make_initial_curve(s, ChartEllipseCurve{1.0, 0.6, 0.1, 0.0}, 64)));
  const double e3 = std::abs(gauss_bonnet_residual(s, make_initial_curve(s, ChartEllipseCurve{1.0, 0.6, 0.1, 0.0}, 128)));
  CHECK(e2 < e1);
  CHECK(std::log2(e1 / e2) >= 3.5);
  CHECK(std::log2(e2 / e3) >= 3.5);
}

TEST_CASE("parametric curvature converges at fourth order to the exact graph curvature") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  auto error = [&](std::size_t n) {
    const DiscreteCurve c = test_graph_curve(s, n);
    double e = 0.0;
    const auto u = grid(n);
    for (std::size_t j = 0; j < n; ++j)
      e = std::max(e, std::abs(c.curvature()[j] - exact_graph_curvature(u[j])));
    return e;
  };
  const double e1 = error(32), e2 = error(64);
  CHECK(std::log2(e1 / e2) >= 3.5);
  CHECK(error(512) < 1e-8);
}

TEST_CASE("parametric curvature equals the graph formula on radial graphs") {
  const auto s = SurfaceProfile::from_curvature(ProfileFamily::rational_pinch, 1.0, 2.0, 1.0, 20.0, 1e-3);
  const RadialGraph g = make_initial_graph(s, FourierGraphCurve{1.2, {{2, 0.1}, {5, 0.02}}, {{3, 0.05}}}, 200);
  const DiscreteCurve c = g.to_curve(s);
  const std::vector<double> k = graph_curvature(s, g);
  for (std::size_t j = 0; j < g.size(); ++j)
    CHECK(c.curvature()[j] == doctest::Approx(k[j]).epsilon(1e-10));
}

TEST_CASE("redistribution") {
  const auto s = SurfaceProfile::constant_curvature(1.0);

  SUBCASE("uniform circle is a fixed point") {
    const DiscreteCurve c = make_initial_curve(s, CircleCurve{1.0}, 128);
    const DiscreteCurve d = redistribute(s, c);
    REQUIRE(d.size() == c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
      CHECK(std::abs(d.r()[j] - c.r()[j]) < 1e-12);
      CHECK(std::abs(d.u()[j] - c.u()[j]) < 1e-12);
    }
  }

  SUBCASE("clustered circle becomes uniform") {
    const std::size_t n = 256;
    std::vector<double> r(n, 1.0), u;
    for (double p : grid(n)) u.push_back(p + 0.3 * std::sin(p));
    const DiscreteCurve c = DiscreteCurve::from_samples(s, r, u);
    const DiscreteCurve d = redistribute(s, c);
    // On a circle about the pole ds is proportional to the angle step.
    double lo = 1e300, hi = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double step = d.u()[(j + 1) % n] + (j + 1 == n ? 2.0 * kPi : 0.0) - d.u()[j];
      lo = std::min(lo, step);
      hi = std::max(hi, step);
    }
    CHECK(hi / lo < 1.0 + 1e-6);
    for (double x : d.r()) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("length and area are preserved") {
    const DiscreteCurve c = make_initial_curve(s, ChartEllipseCurve{1.3, 0.6, 0.2, 0.1}, 512);
    const LengthArea before = length_area(s, c);
    const LengthArea after = length_area(s, redistribute(s, c));
    CHECK(after.length == doctest::Approx(before.length).epsilon(1e-8));
    CHECK(after.area == doctest::Approx(before.area).epsilon(1e-8));
  }
}

TEST_CASE("initial curves") {
  const auto s = SurfaceProfile::constant_curvature(1.0);

  const DiscreteCurve circle = make_initial_curve(s, CircleCurve{1.0}, 256);
  CHECK(circle.kappa_max() - circle.kappa_min() < 1e-9);

  const std::size_t n = 256;
  const RadialGraph g = make_initial_graph(s, PerturbedCircleCurve{1.0, 2, 1e-3}, n);
  double c2 = 0.0, s2 = 0.0;
  const auto u = grid(n);
  for (std::size_t j = 0; j < n; ++j) {
    c2 += g.r()[j] * std::cos(2.0 * u[j]);
    s2 += g.r()[j] * std::sin(2.0 * u[j]);
  }
  c2 *= 2.0 / static_cast<double>(n);
  s2 *= 2.0 / static_cast<double>(n);
  CHECK(c2 == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(std::abs(s2) < 1e-15);

  const Convexity cv = convexity(test_graph_curve(s, 256));
  CHECK(cv.convex);
  CHECK(cv.kappa_min > 0.0);

  CHECK(is_graph_kind(CircleCurve{}));
  CHECK_FALSE(is_graph_kind(ChartEllipseCurve{}));
  CHECK_THROWS_AS(make_initial_graph(s, ChartEllipseCurve{}, 64), ParameterError);
  CHECK_THROWS_AS(make_initial_curve(s, CircleCurve{25.0}, 64), ParameterError);
  CHECK_THROWS_AS(make_initial_curve(s, PerturbedCircleCurve{0.01, 2, 0.02}, 64), ParameterError);
  CHECK_THROWS_AS(make_initial_curve(s, CircleCurve{1.0}, 8), ParameterError);
}

TEST_CASE("degenerate samples are rejected") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  std::vector<double> r(32, 1.0), u(32, 0.5);
  CHECK_THROWS_AS(DiscreteCurve::from_samples(s, r, u), DegeneracyError);
  std::vector<double> short_r(3, 1.0), short_u{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(DiscreteCurve::from_samples(s, short_r, short_u), ParameterError);
  std::vector<double> mismatched(31, 1.0);
  CHECK_THROWS_AS(DiscreteCurve::from_samples(s, mismatched, grid(32)), ParameterError);
}

TEST_CASE("embeddedness and winding") {
  const auto s = SurfaceProfile::constant_curvature(1.0);
  const DiscreteCurve circle = make_initial_curve(s, CircleCurve{1.0}, 64);
  CHECK(is_embedded(circle));
  CHECK(winding_number(circle, Pole{}) == 1);
  CHECK(winding_number(circle, ChartPoint{0.5, 1.0}) == 1);
  CHECK(winding_number(circle, ChartPoint{1.5, 1.0}) == 0);

  // Figure eight in the chart plane around (1, 0).
  const std::size_t n = 128;
  std::vector<double> r, u;
  for (double p : grid(n)) {
    const double t = p + 0.01;
    const double x = 1.0 + 0.5 * std::sin(t), y = 0.3 * std::sin(2.0 * t);
    r.push_back(std::hypot(x, y));
    u.push_back(std::atan2(y, x));
  }
  CHECK_FALSE(is_embedded(DiscreteCurve::from_samples(s, r, u)));
}
