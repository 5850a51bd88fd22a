#include "pinchflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "pinchflow/errors.hpp"
#include "pinchflow/flow.hpp"
#include "pinchflow/periodic.hpp"

namespace pinchflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double coth(double x) { return 1.0 / std::tanh(x); }

// Absolute rounding scale of L^2 - 4 pi A - a^2 A^2; its square root bounds the
// error of sqrt(Delta) near the equality case.
double deficit_roundoff(double length) { return 1e-14 * std::max(1.0, length * length); }

}  // namespace

DiagnosticsRecord make_record(const SurfaceProfile& surface, const DiscreteCurve& curve,
                              double alpha, long step, double t, double dt_used) {
  DiagnosticsRecord d;
  d.step = step;
  d.t = t;
  d.dt_used = dt_used;
  const LengthArea la = length_area(surface, curve);
  d.length = la.length;
  d.area = la.area;
  d.deficit = isoperimetric_deficit(la.length, std::abs(la.area), surface.a());
  d.h = global_term(curve, alpha);
  d.kappa_min = curve.kappa_min();
  d.kappa_max = curve.kappa_max();
  for (double k : curve.curvature()) d.sup_kappa_minus_h = std::max(d.sup_kappa_minus_h, std::abs(k - d.h));
  d.gb_residual = gauss_bonnet_residual(surface, curve);
  const auto r = curve.r();
  d.r_min = *std::min_element(r.begin(), r.end());
  d.r_max = *std::max_element(r.begin(), r.end());
  return d;
}

void attach_radii(const SurfaceProfile& surface, const DiscreteCurve& curve,
                  DiagnosticsRecord& record, const RadiiSearch& search) {
  const Radii radii = inradius_outradius(surface, curve, search);
  record.rho_minus = radii.inner;
  record.rho_plus = radii.outer;
  record.rho_minus_center = radii.inner_center;
  record.rho_plus_center = radii.outer_center;
  record.radii_accuracy = radii.accuracy;
  const SurfacePoint centre = winding_number(curve, Pole{}) != 0 ? SurfacePoint{Pole{}}
                                                                   : radii.inner_center;
  try {
    const SupportFunction u = support_function(surface, centre, curve);
    record.support_min = u.min_sinh();
    record.support_max = u.max_sinh();
  } catch (const PreconditionError&) {
    // Centre on the curve: leave the support columns empty.
  }
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::warning: return "warning";
    case CheckStatus::failure: return "failure";
  }
  return "failure";
}

void Report::append(const Report& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

bool Report::has_failure(bool strict) const {
  return std::any_of(checks.begin(), checks.end(), [&](const CheckResult& c) {
    return c.status == CheckStatus::failure || (strict && c.status == CheckStatus::warning);
  });
}

std::string Report::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j;
    j["check"] = c.name;
    j["status"] = to_string(c.status);
    j["worst_excess"] = c.worst_excess;
    j["slack"] = c.slack;
    nlohmann::json loc = nlohmann::json::object();
    loc["t"] = c.t ? nlohmann::json(*c.t) : nlohmann::json(nullptr);
    loc["sample"] = c.sample ? nlohmann::json(*c.sample) : nlohmann::json(nullptr);
    j["location"] = loc;
    j["detail"] = c.detail;
    list.push_back(j);
  }
  out["checks"] = list;
  out["failed"] = has_failure(false);
  out["failed_strict"] = has_failure(true);
  return out.dump(2) + "\n";
}

void InequalityTracker::observe(double lhs, double rhs, double slack, std::optional<double> t,
                                std::optional<long> sample, double extra_rounding) {
  const double excess = lhs - rhs;
  // Rounding of the two sides themselves is not a violation.
  const double rounding = 4.0 * kEps * (std::abs(lhs) + std::abs(rhs)) + extra_rounding;
  CheckStatus status = CheckStatus::pass;
  if (!(excess <= rounding)) status = excess <= slack + rounding ? CheckStatus::warning : CheckStatus::failure;
  if (!std::isfinite(excess)) status = CheckStatus::failure;
  if (status > result_.status) result_.status = status;
  if (!seen_ || excess > result_.worst_excess || !std::isfinite(excess)) {
    result_.worst_excess = excess;
    result_.slack = slack;
    result_.t = t;
    result_.sample = sample;
    seen_ = true;
  }
}

CheckResult InequalityTracker::result() const {
  CheckResult r = result_;
  if (!seen_) r.detail = "no evaluations";
  return r;
}

Report check_monotonicity(const RunRecord& run, const MonotonicityOptions& options) {
  const auto& rec = run.records;
  if (rec.size() < 2) throw PreconditionError("monotonicity checks need at least two records");
  const double l0 = rec.front().length;
  const double a0 = std::abs(rec.front().area);
  const double d0 = rec.front().deficit;
  Report report;

  InequalityTracker length_down("length_nonincreasing");
  InequalityTracker area_up("area_nondecreasing");
  InequalityTracker deficit_down("deficit_nonincreasing");
  InequalityTracker area_kept("area_conserved");
  InequalityTracker length_kept("length_conserved");
  const double deficit_slack = options.relative_slack * d0 + deficit_roundoff(l0);
  for (std::size_t k = 1; k < rec.size(); ++k) {
    const auto& p = rec[k - 1];
    const auto& q = rec[k];
    length_down.observe(q.length, p.length, options.relative_slack * l0, q.t);
    area_up.observe(std::abs(p.area), std::abs(q.area), options.relative_slack * a0, q.t);
    deficit_down.observe(q.deficit, p.deficit, deficit_slack, q.t);
    area_kept.observe(std::abs(std::abs(q.area) - a0) / a0, options.conservation_tolerance, 0.0, q.t);
    length_kept.observe(std::abs(q.length - l0) / l0, options.conservation_tolerance, 0.0, q.t);
  }
  if (run.alpha == 0.0) {
    report.add(length_down.result());
    report.add(area_kept.result());
  } else if (run.alpha == 1.0) {
    report.add(area_up.result());
    report.add(length_kept.result());
  }
  report.add(deficit_down.result());
  return report;
}

double inner_radius_lower_bound(double length0, double area0, double a) {
  const double delta = std::max(0.0, isoperimetric_deficit(length0, area0, a));
  return 2.0 / a * acoth((length0 + std::sqrt(delta)) / (area0 * a));
}

Report check_radius_bounds(const SurfaceProfile& surface, const RunRecord& run) {
  if (run.records.empty()) throw PreconditionError("radius checks need at least one record");
  const double a = surface.a();
  const double l0 = run.records.front().length;
  const double a0 = std::abs(run.records.front().area);
  const double r1 = inner_radius_lower_bound(l0, a0, a);
  // Sensitivity of r1 to the rounding of sqrt(Delta0).
  const double x = (l0 + std::sqrt(std::max(0.0, run.records.front().deficit))) / (a0 * a);
  const double r1_slack =
      2.0 / a / (x * x - 1.0) * std::sqrt(deficit_roundoff(l0)) / (a0 * a) + 1e-9 * r1;

  InequalityTracker isoperimetric("length_ge_a_area");
  InequalityTracker inner_low("inner_radius_lower");
  InequalityTracker inner_high("inner_radius_upper");
  InequalityTracker outer("outer_radius_upper");
  InequalityTracker order("inner_le_outer");
  InequalityTracker osserman("osserman_deficit");
  for (const auto& d : run.records) {
    const double area = std::abs(d.area);
    isoperimetric.observe(a * area, d.length, 1e-9 * d.length, d.t);
    if (!d.rho_minus || !d.rho_plus) continue;
    const double acc = d.radii_accuracy.value_or(0.0);
    const double rm = *d.rho_minus;
    const double rp = *d.rho_plus;
    inner_low.observe(r1, rm, acc + r1_slack, d.t);
    inner_high.observe(rm, l0 / 2.0, acc + 1e-9 * l0, d.t);
    outer.observe(rp, l0, acc + 1e-9 * l0, d.t);
    order.observe(rm, rp, 2.0 * acc, d.t);
    const double s = std::sinh(a * rm / 2.0);
    const double lhs = std::abs(d.length - area * a * coth(a * rm / 2.0));
    const double slope = area * a * a / (2.0 * s * s);
    osserman.observe(lhs, std::sqrt(std::max(0.0, d.deficit)),
                     1e-9 * d.length + std::sqrt(deficit_roundoff(d.length)) + slope * acc, d.t);
  }
  Report report;
  for (auto* t : {&isoperimetric, &inner_low, &inner_high, &outer, &order, &osserman})
    report.add(t->result());
  return report;
}

Report check_convexity(const RunRecord& run) {
  InequalityTracker tracker("convexity_preserved");
  Report report;
  if (run.records.empty() || !run.convex_start) {
    CheckResult r = tracker.result();
    r.detail = "initial curve not convex; not applicable";
    report.add(r);
    return report;
  }
  const double floor = std::min(run.records.front().kappa_min, run.a);
  for (const auto& d : run.records) tracker.observe(floor, d.kappa_min, 1e-6, d.t);
  report.add(tracker.result());
  return report;
}

EscapeCondition check_escape_condition(const SurfaceProfile& surface, double length0,
                                       double area0) {
  if (!(length0 > 0.0) || !(area0 > 0.0)) throw ParameterError("L0 and A0 must be positive");
  const double a = surface.a();
  const double b = surface.b();
  const double delta = std::max(0.0, isoperimetric_deficit(length0, area0, a));
  const double x = (std::sqrt(delta) + length0) / (area0 * a);
  if (!(x > 1.0)) throw DomainError("escape condition undefined: L0 <= a A0");
  EscapeCondition out;
  out.lhs = area0;
  // cosh(y) - 1 written as 2 sinh^2(y / 2) to keep small areas accurate.
  const double half = std::sinh(b / a * acoth(x));
  out.rhs = 4.0 * kPi / (b * b) * half * half;
  out.margin = out.rhs - out.lhs;
  out.satisfied = out.margin >= -1e-12 * area0;
  return out;
}

ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& value,
                               const std::function<bool(double)>& in_window) {
  if (t.size() != value.size()) throw ParameterError("time and value series differ in length");
  std::vector<double> xs, ys;
  int sign = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!in_window(value[k]) || value[k] == 0.0) continue;
    const int s = value[k] > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign) throw InconclusiveError("values change sign inside the fit window");
    sign = s;
    xs.push_back(t[k]);
    ys.push_back(std::log(std::abs(value[k])));
  }
  if (xs.size() < 10)
    throw InconclusiveError("fit window holds " + std::to_string(xs.size()) +
                            " samples; at least 10 are needed");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (sxx == 0.0) throw InconclusiveError("fit window spans zero time");
  ExponentialFit fit;
  fit.rate = sxy / sxx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.t_begin = *std::min_element(xs.begin(), xs.end());
  fit.t_end = *std::max_element(xs.begin(), xs.end());
  fit.points = xs.size();
  return fit;
}

Report check_hessian_comparison(const SurfaceProfile& surface, const DiscreteCurve& curve,
                                const SurfacePoint& p0) {
  const double a = surface.a();
  const double b = surface.b();
  InequalityTracker tangent_low("hessian_tangent_lower"), tangent_high("hessian_tangent_upper");
  InequalityTracker normal_low("hessian_normal_lower"), normal_high("hessian_normal_upper");
  InequalityTracker mixed_low("hessian_mixed_lower"), mixed_high("hessian_mixed_upper");
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const ChartPoint x = curve.point(j);
    double dist;
    TangentVector grad;
    double circle;
    if (is_pole(p0)) {
      dist = x.r;
      grad = {1.0, 0.0};
      circle = geodesic_circle_curvature(surface, x.r);
    } else {
      const MinimizingGeodesic g = connect(surface, p0, x);
      dist = g.length;
      if (!(dist > 0.0)) throw PreconditionError("centre lies on the curve");
      grad = g.end_velocity;
      circle = distance_circle_curvature(surface, p0, x);
    }
    const double tr = metric_inner(surface, x.r, curve.tangent(j), grad);
    const double nr = metric_inner(surface, x.r, curve.normal(j), grad);
    const double lo = a * coth(a * dist);
    const double hi = b * coth(b * dist);
    const double slack = 1e-8 * std::max(1.0, hi);
    // Every side is a product with a curvature of size at most hi.
    const double rounding = 8.0 * kEps * hi;
    const long s = static_cast<long>(j);

    const double tangent = circle * (1.0 - tr * tr);
    tangent_low.observe(lo * (1.0 - tr * tr), tangent, slack, {}, s, rounding);
    tangent_high.observe(tangent, hi * (1.0 - tr * tr), slack, {}, s, rounding);

    const double normal = circle * (1.0 - nr * nr);
    normal_low.observe(lo * tr * tr, normal, slack, {}, s, rounding);
    normal_high.observe(normal, hi * tr * tr, slack, {}, s, rounding);

    const double mixed = -circle * nr * tr;
    const double f_ab = 0.5 * (lo * (1.0 - 2.0 * tr * nr) - hi);
    const double f_ba = 0.5 * (hi * (1.0 - 2.0 * tr * nr) - lo);
    mixed_low.observe(f_ab, mixed, slack, {}, s, rounding);
    mixed_high.observe(mixed, f_ba, slack, {}, s, rounding);
  }
  Report report;
  for (auto* t : {&tangent_low, &tangent_high, &normal_low, &normal_high, &mixed_low, &mixed_high})
    report.add(t->result());
  return report;
}

double kappa_evolution_residual(const SurfaceProfile& surface, const DiscreteCurve& before,
                                const DiscreteCurve& middle, const DiscreteCurve& after,
                                double dt, double alpha) {
  const std::size_t n = middle.size();
  if (before.size() != n || after.size() != n) throw ParameterError("curves differ in size");
  const auto k = middle.curvature();
  const auto v = middle.speed();
  const double dp = middle.parameter_step();
  const double h = global_term(middle, alpha);
  std::vector<double> ks = periodic::first_derivative(k, dp);
  for (std::size_t j = 0; j < n; ++j) ks[j] /= v[j];
  std::vector<double> kss = periodic::first_derivative(ks, dp);
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    kss[j] /= v[j];
    const double dkdt = (after.curvature()[j] - before.curvature()[j]) / (2.0 * dt);
    const double gauss = surface.gauss_curvature(middle.r()[j]);
    const double rhs = kss[j] - (h - k[j]) * (gauss + k[j] * k[j]);
    worst = std::max(worst, std::abs(dkdt - rhs));
  }
  return worst;
}

double predicted_rate(const SurfaceProfile& surface, double radius, int mode) {
  const double phi = surface.phi(radius);
  return (-static_cast<double>(mode) * mode + surface.psi(radius)) / (phi * phi);
}

std::string SpectrumReport::to_json() const {
  nlohmann::json out;
  out["surface"] = surface_id;
  out["radius"] = radius;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j;
    j["mode"] = e.mode;
    j["predicted_rate"] = e.predicted;
    j["fitted_rate"] = e.fitted;
    j["relative_error"] = e.relative_error;
    j["r_squared"] = e.r_squared;
    j["fit_window"] = {e.window_begin, e.window_end};
    j["whole_run_fit"] = e.whole_run_fit;
    list.push_back(j);
  }
  out["entries"] = list;
  return out.dump(2) + "\n";
}

}  // namespace pinchflow
