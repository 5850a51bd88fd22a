#include "pinchflow/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pinchflow/errors.hpp"

namespace pinchflow {

namespace {

struct Hermite {
  double h00, h10, h01, h11;
  explicit Hermite(double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    h10 = t3 - 2.0 * t2 + t;
    h01 = -2.0 * t3 + 3.0 * t2;
    h11 = t3 - t2;
  }
  double operator()(double f0, double f1, double m0, double m1, double h) const {
    return h00 * f0 + h10 * h * m0 + h01 * f1 + h11 * h * m1;
  }
};

double tanh_pinch_curvature(double a, double b, double c, double r) {
  return -a * a - (b * b - a * a) * std::tanh(c * r * r);
}

double tanh_pinch_slope(double a, double b, double c, double r) {
  const double sech = 1.0 / std::cosh(c * r * r);
  return -(b * b - a * a) * 2.0 * c * r * sech * sech;
}

double rational_pinch_curvature(double a, double b, double c, double r) {
  const double cr2 = c * r * r;
  return -(a * a + b * b * cr2) / (1.0 + cr2);
}

double rational_pinch_slope(double a, double b, double c, double r) {
  const double q = 1.0 + c * r * r;
  return -2.0 * c * r * (b * b - a * a) / (q * q);
}

}  // namespace

struct SurfaceProfile::Table {
  double step = 1e-3;
  // Node k sits at r = k * step, node 0 is the pole.
  std::vector<double> phi, dphi, primitive, psi, dpsi, curvature;
  bool analytic_law = true;
  bool psi_from_formula = false;

  std::size_t nodes() const { return phi.size(); }
  double end() const { return step * static_cast<double>(nodes() - 1); }
};

std::string to_string(ProfileFamily family) {
  switch (family) {
    case ProfileFamily::constant_curvature:
      return "constant_curvature";
    case ProfileFamily::tanh_pinch:
      return "tanh_pinch";
    case ProfileFamily::rational_pinch:
      return "rational_pinch";
    case ProfileFamily::tabulated:
      return "tabulated";
  }
  return "unknown";
}

ProfileFamily profile_family_from_string(const std::string& name) {
  if (name == "constant_curvature") return ProfileFamily::constant_curvature;
  if (name == "tanh_pinch") return ProfileFamily::tanh_pinch;
  if (name == "rational_pinch") return ProfileFamily::rational_pinch;
  if (name == "tabulated") return ProfileFamily::tabulated;
  throw ParameterError("unknown surface family '" + name + "'");
}

SurfaceProfile SurfaceProfile::constant_curvature(double a, std::optional<double> r_max,
                                                  double grid_step) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("curvature bound a must be positive");
  SurfaceProfile s;
  s.family_ = ProfileFamily::constant_curvature;
  s.a_ = a;
  s.b_ = a;
  s.r_max_ = r_max.value_or(20.0 / a);
  s.grid_step_ = grid_step;
  if (!(s.r_max_ > 0.0)) throw ParameterError("r_max must be positive");
  if (!(grid_step > 0.0) || grid_step * 16.0 > s.r_max_)
    throw ParameterError("grid_step must be positive and well below r_max");
  return s;
}

double SurfaceProfile::curvature_law(double r) const {
  switch (family_) {
    case ProfileFamily::constant_curvature:
      return -a_ * a_;
    case ProfileFamily::tanh_pinch:
      return tanh_pinch_curvature(a_, b_, c_, r);
    case ProfileFamily::rational_pinch:
      return rational_pinch_curvature(a_, b_, c_, r);
    case ProfileFamily::tabulated:
      break;
  }
  // Linear interpolation of the nodal curvature.
  const Table& t = *table_;
  const double x = r / t.step;
  const auto k = std::min(static_cast<std::size_t>(x), t.nodes() - 2);
  const double w = x - static_cast<double>(k);
  return (1.0 - w) * t.curvature[k] + w * t.curvature[k + 1];
}

SurfaceProfile SurfaceProfile::from_curvature(ProfileFamily family, double a, double b, double c,
                                              double r_max, double grid_step) {
  if (family == ProfileFamily::tabulated)
    throw ParameterError("from_curvature needs an analytic curvature family");
  if (!(a > 0.0)) throw ParameterError("curvature bound a must be positive");
  if (!(b >= a)) throw ParameterError("pinching requires b >= a");
  if (family != ProfileFamily::constant_curvature && !(c > 0.0))
    throw ParameterError("shape parameter c must be positive");
  if (!(r_max > 0.0)) throw ParameterError("r_max must be positive");
  if (!(grid_step > 0.0) || grid_step * 16.0 > r_max)
    throw ParameterError("grid_step must be positive and well below r_max");

  SurfaceProfile s;
  s.family_ = family;
  s.a_ = a;
  s.b_ = family == ProfileFamily::constant_curvature ? a : b;
  s.c_ = family == ProfileFamily::constant_curvature ? 0.0 : c;
  s.r_max_ = r_max;
  s.grid_step_ = grid_step;

  auto curvature = [&](double r) -> double {
    switch (family) {
      case ProfileFamily::tanh_pinch:
        return tanh_pinch_curvature(a, b, c, r);
      case ProfileFamily::rational_pinch:
        return rational_pinch_curvature(a, b, c, r);
      default:
        return -a * a;
    }
  };
  auto slope = [&](double r) -> double {
    switch (family) {
      case ProfileFamily::tanh_pinch:
        return tanh_pinch_slope(a, b, c, r);
      case ProfileFamily::rational_pinch:
        return rational_pinch_slope(a, b, c, r);
      default:
        return 0.0;
    }
  };

  auto table = std::make_shared<Table>();
  const double h = grid_step;
  const auto intervals = static_cast<std::size_t>(std::ceil(r_max / h - 1e-9));
  const std::size_t n = intervals + 1;
  table->step = h;
  table->phi.resize(n);
  table->dphi.resize(n);
  table->primitive.resize(n);
  table->psi.resize(n);
  table->dpsi.resize(n);
  table->curvature.resize(n);

  // State: phi, phi', Phi, psi with derivative (phi', -K phi, phi, K' phi^2).
  using State = std::array<double, 4>;
  auto rhs = [&](double r, const State& y) -> State {
    return {y[1], -curvature(r) * y[0], y[0], slope(r) * y[0] * y[0]};
  };

  const double k0 = curvature(0.0);
  table->phi[0] = 0.0;
  table->dphi[0] = 1.0;
  table->primitive[0] = 0.0;
  table->psi[0] = 1.0;
  table->dpsi[0] = 0.0;
  table->curvature[0] = k0;

  // Taylor seed at the first node; the chart origin is a removable singularity.
  State y{h - k0 * h * h * h / 6.0, 1.0 - k0 * h * h / 2.0, h * h / 2.0 - k0 * h * h * h * h / 24.0,
          1.0 + slope(h) * h * h * h / 4.0};
  for (std::size_t k = 1; k < n; ++k) {
    const double r = h * static_cast<double>(k);
    table->phi[k] = y[0];
    table->dphi[k] = y[1];
    table->primitive[k] = y[2];
    table->psi[k] = y[3];
    table->curvature[k] = curvature(r);
    table->dpsi[k] = slope(r) * y[0] * y[0];
    if (k + 1 == n) break;
    const State k1 = rhs(r, y);
    State tmp;
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const State k2 = rhs(r + 0.5 * h, tmp);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const State k3 = rhs(r + 0.5 * h, tmp);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + h * k3[i];
    const State k4 = rhs(r + h, tmp);
    for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  s.table_ = std::move(table);
  s.check_invariants();
  return s;
}

SurfaceProfile SurfaceProfile::from_table(double a, double b, const std::vector<double>& r,
                                          const std::vector<double>& phi,
                                          const std::vector<double>& dphi,
                                          const std::vector<double>& ddphi) {
  if (!(a > 0.0)) throw ParameterError("curvature bound a must be positive");
  if (!(b >= a)) throw ParameterError("pinching requires b >= a");
  const std::size_t m = r.size();
  if (m < 17 || phi.size() != m || dphi.size() != m || ddphi.size() != m)
    throw ParameterError("tabulated profile needs at least 17 rows of equal length");
  const double h = r[1] - r[0];
  if (!(h > 0.0)) throw ParameterError("tabulated radii must increase");
  for (std::size_t k = 1; k < m; ++k) {
    if (std::abs(r[k] - r[k - 1] - h) > 1e-9 * h)
      throw ParameterError("tabulated radii must be uniformly spaced");
  }
  const bool has_origin = std::abs(r[0]) <= 1e-12 * h;
  if (!has_origin && std::abs(r[0] - h) > 1e-9 * h)
    throw ParameterError("tabulated grid must start at r=0 or r=step");

  auto table = std::make_shared<Table>();
  table->step = h;
  table->analytic_law = false;
  table->psi_from_formula = true;
  const std::size_t offset = has_origin ? 0 : 1;
  const std::size_t n = m + offset;
  table->phi.assign(n, 0.0);
  table->dphi.assign(n, 1.0);
  table->primitive.assign(n, 0.0);
  table->psi.assign(n, 1.0);
  table->dpsi.assign(n, 0.0);
  table->curvature.assign(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    table->phi[k + offset] = phi[k];
    table->dphi[k + offset] = dphi[k];
  }
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t src = k - offset;
    table->curvature[k] = -ddphi[src] / phi[src];
    table->psi[k] = dphi[src] * dphi[src] - phi[src] * ddphi[src];
  }
  table->curvature[0] = table->curvature[1];
  for (std::size_t k = 1; k < n; ++k) {
    // Exact integral of the cubic Hermite interpolant of phi on [r_{k-1}, r_k].
    const double f0 = table->phi[k - 1], f1 = table->phi[k];
    const double m0 = table->dphi[k - 1], m1 = table->dphi[k];
    table->primitive[k] = table->primitive[k - 1] + h * (f0 + f1) / 2.0 + h * h * (m0 - m1) / 12.0;
  }

  SurfaceProfile s;
  s.family_ = ProfileFamily::tabulated;
  s.a_ = a;
  s.b_ = b;
  s.grid_step_ = h;
  s.r_max_ = h * static_cast<double>(n - 1);
  s.table_ = std::move(table);
  s.check_invariants();
  return s;
}

std::string SurfaceProfile::id() const {
  std::ostringstream os;
  os << to_string(family_) << "(a=" << a_;
  if (family_ != ProfileFamily::constant_curvature) os << ",b=" << b_;
  if (family_ == ProfileFamily::tanh_pinch || family_ == ProfileFamily::rational_pinch)
    os << ",c=" << c_;
  os << ")";
  return os.str();
}

WarpSample SurfaceProfile::warp(double r) const {
  if (!table_) {
    if (!(r >= 0.0)) throw DomainError("warp evaluated at negative radius");
    const double ar = a_ * r;
    const double sh = std::sinh(ar);
    return {sh / a_, std::cosh(ar), a_ * sh};
  }
  const Table& t = *table_;
  if (!(r >= 0.0) || r > t.end() * (1.0 + 1e-12))
    throw DomainError("radius " + std::to_string(r) + " outside tabulated range");
  const double x = r / t.step;
  const auto k = std::min(static_cast<std::size_t>(x), t.nodes() - 2);
  const Hermite w(x - static_cast<double>(k));
  const double dd0 = -t.curvature[k] * t.phi[k];
  const double dd1 = -t.curvature[k + 1] * t.phi[k + 1];
  WarpSample out;
  out.phi = w(t.phi[k], t.phi[k + 1], t.dphi[k], t.dphi[k + 1], t.step);
  out.dphi = w(t.dphi[k], t.dphi[k + 1], dd0, dd1, t.step);
  // phi'' from K phi keeps K = -phi''/phi exact between nodes.
  out.ddphi = -curvature_law(r) * out.phi;
  return out;
}

double SurfaceProfile::area_primitive(double r) const {
  if (!table_) {
    if (!(r >= 0.0)) throw DomainError("area primitive evaluated at negative radius");
    const double ar = a_ * r;
    // (cosh(ar) - 1)/a^2 without cancellation for small ar.
    const double sh = std::sinh(0.5 * ar);
    return 2.0 * sh * sh / (a_ * a_);
  }
  const Table& t = *table_;
  if (!(r >= 0.0) || r > t.end() * (1.0 + 1e-12))
    throw DomainError("radius " + std::to_string(r) + " outside tabulated range");
  const double x = r / t.step;
  const auto k = std::min(static_cast<std::size_t>(x), t.nodes() - 2);
  const Hermite w(x - static_cast<double>(k));
  return w(t.primitive[k], t.primitive[k + 1], t.phi[k], t.phi[k + 1], t.step);
}

double SurfaceProfile::gauss_curvature(double r) const {
  if (!(r >= 0.0)) throw DomainError("curvature evaluated at negative radius");
  if (!table_) return -a_ * a_;
  return curvature_law(r);
}

double SurfaceProfile::psi(double r) const {
  if (!table_) {
    if (!(r >= 0.0)) throw DomainError("psi evaluated at negative radius");
    return 1.0;
  }
  const Table& t = *table_;
  if (t.psi_from_formula) {
    const WarpSample s = warp(r);
    return s.dphi * s.dphi - s.phi * s.ddphi;
  }
  if (!(r >= 0.0) || r > t.end() * (1.0 + 1e-12))
    throw DomainError("radius " + std::to_string(r) + " outside tabulated range");
  const double x = r / t.step;
  const auto k = std::min(static_cast<std::size_t>(x), t.nodes() - 2);
  const Hermite w(x - static_cast<double>(k));
  return w(t.psi[k], t.psi[k + 1], t.dpsi[k], t.dpsi[k + 1], t.step);
}

double SurfaceProfile::inverse_phi(double value) const {
  if (value <= 0.0) return 0.0;
  if (!table_) return std::asinh(a_ * value) / a_;
  const Table& t = *table_;
  if (value > t.phi.back()) throw DomainError("phi value beyond tabulated range");
  const auto it = std::upper_bound(t.phi.begin(), t.phi.end(), value);
  const auto k = static_cast<std::size_t>(std::distance(t.phi.begin(), it)) - 1;
  double lo = t.step * static_cast<double>(k);
  double hi = std::min(lo + t.step, t.end());
  // phi is increasing and convex on each cell: safeguarded Newton.
  double r = lo + (value - t.phi[k]) / std::max(t.dphi[k], 1e-300);
  r = std::clamp(r, lo, hi);
  for (int iter = 0; iter < 60; ++iter) {
    const WarpSample s = warp(r);
    const double f = s.phi - value;
    if (f > 0.0)
      hi = r;
    else
      lo = r;
    double next = r - f / s.dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-16 * r) return next;
    r = next;
  }
  return r;
}

void SurfaceProfile::check_invariants() const {
  const Table& t = *table_;
  const double tol_k = ProfileTolerances::curvature * b_ * b_;
  const std::size_t n = t.nodes();
  for (std::size_t k = 1; k < n; ++k) {
    const double r = t.step * static_cast<double>(k);
    if (!(t.phi[k] > 0.0)) throw ConstructionError("phi > 0", r, "phi=" + std::to_string(t.phi[k]));
    if (!(t.dphi[k] > 0.0))
      throw ConstructionError("phi' > 0", r, "phi'=" + std::to_string(t.dphi[k]));
    const double kr = t.curvature[k];
    if (kr < -b_ * b_ - tol_k || kr > -a_ * a_ + tol_k)
      throw ConstructionError("-b^2 <= K <= -a^2", r, "K=" + std::to_string(kr));
    const double scale = std::max(1.0, t.dphi[k] * t.dphi[k]);
    if (t.psi[k] > 1.0 + ProfileTolerances::psi * scale)
      throw ConstructionError("psi <= 1", r, "psi=" + std::to_string(t.psi[k]));
    if (t.analytic_law && t.psi[k] > t.psi[k - 1] + ProfileTolerances::psi * scale)
      throw ConstructionError("psi non-increasing", r, "psi rises to " + std::to_string(t.psi[k]));
    if (!t.psi_from_formula) {
      const double direct = t.dphi[k] * t.dphi[k] + kr * t.phi[k] * t.phi[k];
      if (std::abs(direct - t.psi[k]) > ProfileTolerances::psi * scale)
        throw ConstructionError("psi = phi'^2 - phi phi''", r,
                                "integrated " + std::to_string(t.psi[k]) + " vs direct " +
                                    std::to_string(direct));
    }
    if (k >= 2 && k + 2 < n) {
      const double d = (t.primitive[k - 2] - 8.0 * t.primitive[k - 1] + 8.0 * t.primitive[k + 1] -
                        t.primitive[k + 2]) /
                       (12.0 * t.step);
      if (std::abs(d - t.phi[k]) > ProfileTolerances::primitive * std::max(1.0, t.phi[k]))
        throw ConstructionError("Phi' = phi", r,
                                "Phi'=" + std::to_string(d) + " phi=" + std::to_string(t.phi[k]));
    }
  }
}

double geodesic_circle_curvature(const SurfaceProfile& surface, double r) {
  if (!(r > 0.0) || r > surface.r_max())
    throw DomainError("geodesic circle radius must lie in (0, r_max]");
  const WarpSample s = surface.warp(r);
  return s.dphi / s.phi;
}

DiskMeasures model_disk(double a, double rho) {
  if (!(a > 0.0)) throw ParameterError("model curvature bound a must be positive");
  if (!(rho > 0.0)) throw ParameterError("disk radius must be positive");
  const double sh = std::sinh(0.5 * a * rho);
  return {2.0 * std::numbers::pi * std::sinh(a * rho) / a,
          4.0 * std::numbers::pi * sh * sh / (a * a)};
}

double isoperimetric_deficit(double length, double area, double a) {
  return length * length - 4.0 * std::numbers::pi * area - a * a * area * area;
}

double acoth(double x) {
  if (!(std::abs(x) > 1.0)) throw DomainError("acoth needs |x| > 1");
  return std::atanh(1.0 / x);
}

}  // namespace pinchflow
