#include "pinchflow/curve.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "pinchflow/errors.hpp"
#include "pinchflow/periodic.hpp"

namespace pinchflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinSpeed = 1e-12;

double signed_chart_area(std::span<const double> r, std::span<const double> u) {
  const std::size_t n = r.size();
  double twice = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j + 1) % n;
    const double x0 = r[j] * std::cos(u[j]), y0 = r[j] * std::sin(u[j]);
    const double x1 = r[k] * std::cos(u[k]), y1 = r[k] * std::sin(u[k]);
    twice += x0 * y1 - x1 * y0;
  }
  return 0.5 * twice;
}

}  // namespace

DiscreteCurve DiscreteCurve::from_samples(const SurfaceProfile& surface, std::vector<double> r,
                                          std::vector<double> u) {
  const std::size_t n = r.size();
  if (n < kMinCurveSamples)
    throw ParameterError("a curve needs at least " + std::to_string(kMinCurveSamples) + " samples");
  if (u.size() != n) throw ParameterError("r and u sample counts differ");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(r[j]) || !std::isfinite(u[j]))
      throw DegeneracyError("non-finite curve sample at index " + std::to_string(j));
    if (!surface.in_annulus(r[j]))
      throw ParameterError("sample " + std::to_string(j) + " at r=" + std::to_string(r[j]) +
                           " lies outside the annulus [grid_step, r_max]");
  }

  DiscreteCurve c;
  // Monotone lift of the angle.
  c.u_.resize(n);
  c.u_[0] = u[0];
  for (std::size_t j = 1; j < n; ++j) c.u_[j] = c.u_[j - 1] + wrap_difference(u[j] - u[j - 1]);
  const double closing = wrap_difference(u[0] - c.u_[n - 1]);
  const double total = c.u_[n - 1] + closing - c.u_[0];
  c.turns_ = static_cast<int>(std::lround(total / kTwoPi));
  c.r_ = std::move(r);

  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j + 1) % n;
    const ChartXY a = to_xy({c.r_[j], c.u_[j]});
    const ChartXY b = to_xy({c.r_[k], c.u_[k]});
    if (std::hypot(a.x - b.x, a.y - b.y) <= 0.0)
      throw DegeneracyError("adjacent samples " + std::to_string(j) + " and " + std::to_string(k) +
                            " coincide");
  }

  c.dp_ = kTwoPi / static_cast<double>(n);
  const double jump = kTwoPi * c.turns_;
  c.r_dot_ = periodic::first_derivative(c.r_, c.dp_);
  c.u_dot_ = periodic::first_derivative(c.u_, c.dp_, jump);
  const std::vector<double> r_dd = periodic::second_derivative(c.r_, c.dp_);
  const std::vector<double> u_dd = periodic::second_derivative(c.u_, c.dp_, jump);

  c.speed_.resize(n);
  c.kappa_.resize(n);
  c.ds_.resize(n);
  c.phi_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const WarpSample w = surface.warp(c.r_[j]);
    const double rd = c.r_dot_[j], ud = c.u_dot_[j];
    const double v = std::sqrt(rd * rd + w.phi * w.phi * ud * ud);
    if (!(v >= kMinSpeed))
      throw DegeneracyError("parametric speed below 1e-12 at sample " + std::to_string(j));
    const double numer = w.phi * (rd * u_dd[j] - ud * r_dd[j]) +
                         w.phi * w.phi * w.dphi * ud * ud * ud + 2.0 * w.dphi * rd * rd * ud;
    c.speed_[j] = v;
    c.kappa_[j] = numer / (v * v * v);
    c.ds_[j] = v * c.dp_;
    c.phi_[j] = w.phi;
  }
  c.ccw_ = signed_chart_area(c.r_, c.u_) > 0.0;
  return c;
}

TangentVector DiscreteCurve::tangent(std::size_t j) const {
  return {r_dot_[j] / speed_[j], u_dot_[j] / speed_[j]};
}

TangentVector DiscreteCurve::normal(std::size_t j) const {
  const double v = speed_[j];
  return {phi_[j] * u_dot_[j] / v, -r_dot_[j] / (phi_[j] * v)};
}

double DiscreteCurve::kappa_min() const { return *std::min_element(kappa_.begin(), kappa_.end()); }
double DiscreteCurve::kappa_max() const { return *std::max_element(kappa_.begin(), kappa_.end()); }

RadialGraph::RadialGraph(std::vector<double> values) : r_(std::move(values)) {
  if (r_.size() < kMinCurveSamples)
    throw ParameterError("a radial graph needs at least " + std::to_string(kMinCurveSamples) +
                         " samples");
}

double RadialGraph::spacing() const noexcept { return kTwoPi / static_cast<double>(r_.size()); }

double RadialGraph::mean_radius() const {
  double s = 0.0;
  for (double x : r_) s += x;
  return s / static_cast<double>(r_.size());
}

DiscreteCurve RadialGraph::to_curve(const SurfaceProfile& surface) const {
  const std::size_t n = r_.size();
  std::vector<double> u(n);
  const double du = spacing();
  for (std::size_t j = 0; j < n; ++j) u[j] = du * static_cast<double>(j);
  return DiscreteCurve::from_samples(surface, r_, std::move(u));
}

std::vector<double> graph_curvature(const SurfaceProfile& surface, const RadialGraph& graph) {
  const std::size_t n = graph.size();
  const double du = graph.spacing();
  const std::vector<double> ru = periodic::first_derivative(graph.r(), du);
  const std::vector<double> ruu = periodic::second_derivative(graph.r(), du);
  std::vector<double> kappa(n);
  for (std::size_t j = 0; j < n; ++j) {
    const WarpSample w = surface.warp(graph.r()[j]);
    const double v = std::sqrt(ru[j] * ru[j] + w.phi * w.phi);
    kappa[j] = -w.phi / (v * v * v) * ruu[j] + w.dphi / v * (1.0 + ru[j] * ru[j] / (v * v));
  }
  return kappa;
}

LengthArea length_area(const SurfaceProfile& surface, const DiscreteCurve& curve) {
  LengthArea out;
  const auto r = curve.r();
  const auto ud = curve.u_dot();
  const auto ds = curve.ds();
  for (std::size_t j = 0; j < curve.size(); ++j) {
    out.length += ds[j];
    out.area += surface.area_primitive(r[j]) * ud[j];
  }
  out.area *= curve.parameter_step();
  return out;
}

double enclosed_negative_curvature(const SurfaceProfile& surface, const DiscreteCurve& curve) {
  double sum = 0.0;
  const auto r = curve.r();
  const auto ud = curve.u_dot();
  for (std::size_t j = 0; j < curve.size(); ++j) sum += -surface.curvature_primitive(r[j]) * ud[j];
  return sum * curve.parameter_step();
}

double gauss_bonnet_residual(const SurfaceProfile& surface, const DiscreteCurve& curve) {
  double total_curvature = 0.0;
  const auto kappa = curve.curvature();
  const auto ds = curve.ds();
  for (std::size_t j = 0; j < curve.size(); ++j) total_curvature += kappa[j] * ds[j];
  const double orientation = curve.counterclockwise() ? 1.0 : -1.0;
  return total_curvature - kTwoPi * orientation - enclosed_negative_curvature(surface, curve);
}

DiscreteCurve redistribute(const SurfaceProfile& surface, const DiscreteCurve& curve) {
  using boost::math::quadrature::gauss;
  const std::size_t n = curve.size();
  const double dp = curve.parameter_step();
  const double turns = curve.turns();
  std::vector<double> periodic_u(n);
  for (std::size_t j = 0; j < n; ++j)
    periodic_u[j] = curve.u()[j] - turns * dp * static_cast<double>(j);
  const periodic::PeriodicSpline rs(std::vector<double>(curve.r().begin(), curve.r().end()), kTwoPi);
  const periodic::PeriodicSpline us(std::move(periodic_u), kTwoPi);

  auto speed = [&](double p) {
    const double rr = rs(p);
    if (!(rr > 0.0)) throw DegeneracyError("interpolated radius left the chart");
    const double phi = surface.phi(rr);
    const double rd = rs.derivative(p);
    const double ud = us.derivative(p) + turns;
    return std::sqrt(rd * rd + phi * phi * ud * ud);
  };
  auto arc = [&](double p0, double p1) { return gauss<double, 10>::integrate(speed, p0, p1); };

  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double p0 = dp * static_cast<double>(j);
    cumulative[j + 1] = cumulative[j] + arc(p0, p0 + dp);
  }
  const double total = cumulative[n];
  if (!(total > 0.0) || !std::isfinite(total))
    throw DegeneracyError("redistribution produced a degenerate arclength");

  std::vector<double> r_new(n), u_new(n);
  std::size_t cell = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n);
    while (cell + 1 < n && cumulative[cell + 1] <= target) ++cell;
    const double p_lo = dp * static_cast<double>(cell);
    const double remaining = target - cumulative[cell];
    double lo = p_lo, hi = p_lo + dp;
    double p = p_lo + dp * remaining / std::max(cumulative[cell + 1] - cumulative[cell], 1e-300);
    for (int iter = 0; iter < 50; ++iter) {
      const double f = arc(p_lo, p) - remaining;
      if (f > 0.0)
        hi = p;
      else
        lo = p;
      double next = p - f / speed(p);
      if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
      const bool done = std::abs(next - p) <= 1e-15 * kTwoPi;
      p = next;
      if (done) break;
    }
    r_new[k] = rs(p);
    u_new[k] = us(p) + turns * p;
  }
  return DiscreteCurve::from_samples(surface, std::move(r_new), std::move(u_new));
}

bool is_embedded(const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  std::vector<ChartXY> pts(n);
  for (std::size_t j = 0; j < n; ++j) pts[j] = to_xy({curve.r()[j], curve.u()[j]});
  auto orient = [](const ChartXY& a, const ChartXY& b, const ChartXY& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const ChartXY& a = pts[i];
    const ChartXY& b = pts[(i + 1) % n];
    const double min_x = std::min(a.x, b.x), max_x = std::max(a.x, b.x);
    const double min_y = std::min(a.y, b.y), max_y = std::max(a.y, b.y);
    for (std::size_t k = i + 2; k < n; ++k) {
      if (i == 0 && k == n - 1) continue;  // shares vertex 0
      const ChartXY& c = pts[k];
      const ChartXY& d = pts[(k + 1) % n];
      if (std::max(c.x, d.x) < min_x || std::min(c.x, d.x) > max_x ||
          std::max(c.y, d.y) < min_y || std::min(c.y, d.y) > max_y)
        continue;
      const double o1 = orient(a, b, c), o2 = orient(a, b, d);
      const double o3 = orient(c, d, a), o4 = orient(c, d, b);
      if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
          o4 != 0)
        return false;
    }
  }
  return true;
}

int winding_number(const DiscreteCurve& curve, const SurfacePoint& point) {
  if (is_pole(point)) return curve.turns();
  const ChartXY p = to_xy(std::get<ChartPoint>(point));
  const std::size_t n = curve.size();
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const ChartXY q = to_xy({curve.r()[j % n], curve.u()[j % n]});
    const double ang = std::atan2(q.y - p.y, q.x - p.x);
    if (j > 0) total += wrap_difference(ang - prev);
    prev = ang;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

Convexity convexity(const DiscreteCurve& curve) {
  const double m = curve.kappa_min();
  return {m, m > 0.0};
}

bool is_graph_kind(const InitialCurve& kind) {
  return !std::holds_alternative<ChartEllipseCurve>(kind);
}

RadialGraph make_initial_graph(const SurfaceProfile& surface, const InitialCurve& kind,
                               std::size_t n) {
  if (n < kMinCurveSamples)
    throw ParameterError("a curve needs at least " + std::to_string(kMinCurveSamples) + " samples");
  std::vector<double> r(n);
  const double du = kTwoPi / static_cast<double>(n);
  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        for (std::size_t j = 0; j < n; ++j) {
          const double u = du * static_cast<double>(j);
          if constexpr (std::is_same_v<T, CircleCurve>) {
            r[j] = spec.radius;
          } else if constexpr (std::is_same_v<T, PerturbedCircleCurve>) {
            r[j] = spec.radius + spec.amplitude * std::cos(spec.mode * u);
          } else if constexpr (std::is_same_v<T, FourierGraphCurve>) {
            double v = spec.c0;
            for (const auto& [k, c] : spec.cos_terms) v += c * std::cos(k * u);
            for (const auto& [k, s] : spec.sin_terms) v += s * std::sin(k * u);
            r[j] = v;
          } else {
            throw ParameterError("a chart ellipse is not a radial graph about the pole");
          }
        }
      },
      kind);
  for (std::size_t j = 0; j < n; ++j) {
    if (!surface.in_annulus(r[j]))
      throw ParameterError("initial curve leaves the annulus at u-index " + std::to_string(j) +
                           " (r=" + std::to_string(r[j]) + ")");
  }
  return RadialGraph(std::move(r));
}

DiscreteCurve make_initial_curve(const SurfaceProfile& surface, const InitialCurve& kind,
                                 std::size_t n) {
  if (is_graph_kind(kind)) return make_initial_graph(surface, kind, n).to_curve(surface);
  const auto& e = std::get<ChartEllipseCurve>(kind);
  if (!(e.semi_x > 0.0) || !(e.semi_y > 0.0))
    throw ParameterError("ellipse semi-axes must be positive");
  if (n < kMinCurveSamples)
    throw ParameterError("a curve needs at least " + std::to_string(kMinCurveSamples) + " samples");
  std::vector<double> r(n), u(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    const double x = e.center_x + e.semi_x * std::cos(p);
    const double y = e.center_y + e.semi_y * std::sin(p);
    r[j] = std::hypot(x, y);
    u[j] = std::atan2(y, x);
    if (!surface.in_annulus(r[j]))
      throw ParameterError("chart ellipse leaves the annulus at sample " + std::to_string(j));
  }
  return DiscreteCurve::from_samples(surface, std::move(r), std::move(u));
}

}  // namespace pinchflow
