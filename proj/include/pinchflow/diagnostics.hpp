#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pinchflow/curve.hpp"
#include "pinchflow/geodesics.hpp"
#include "pinchflow/record.hpp"
#include "pinchflow/surface.hpp"

namespace pinchflow {

/// Record of a curve at time t. `h` is the global term of the flow exponent
/// alpha; the radii and support-function fields are left empty.
DiagnosticsRecord make_record(const SurfaceProfile& surface, const DiscreteCurve& curve,
                              double alpha, long step, double t, double dt_used);

/// Fills rho_minus/rho_plus (and their centres and accuracy) and, when a centre
/// strictly inside the curve is available, the support-function extrema.
void attach_radii(const SurfaceProfile& surface, const DiscreteCurve& curve,
                  DiagnosticsRecord& record, const RadiiSearch& search = {});

// Check reports ---------------------------------------------------------------

/// pass: inequality holds exactly; warning: holds only within the slack;
/// failure: violated beyond the slack.
enum class CheckStatus { pass, warning, failure };
std::string to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double worst_excess = 0.0;  // max(LHS - RHS) over all evaluations
  double slack = 0.0;         // slack at the worst evaluation
  std::optional<double> t;
  std::optional<long> sample;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;

  void add(CheckResult result) { checks.push_back(std::move(result)); }
  void append(const Report& other);
  bool has_failure(bool strict = false) const;
  /// Canonical JSON text (sorted keys, round-trip numbers).
  std::string to_json() const;
};

/// Accumulates "lhs <= rhs" evaluations and keeps the worst one.
class InequalityTracker {
 public:
  explicit InequalityTracker(std::string name) { result_.name = std::move(name); }
  /// `rounding` is an absolute allowance added to the relative rounding band,
  /// for sides computed from terms much larger than themselves.
  void observe(double lhs, double rhs, double slack, std::optional<double> t = {},
               std::optional<long> sample = {}, double rounding = 0.0);
  CheckResult result() const;

 private:
  CheckResult result_;
  bool seen_ = false;
};

struct MonotonicityOptions {
  double relative_slack = 1e-9;
  double conservation_tolerance = 1e-7;  // relative drift of the conserved quantity
};

/// alpha = 0: L non-increasing, A conserved; alpha = 1: A non-decreasing, L
/// conserved; any alpha: the isoperimetric deficit is non-increasing.
Report check_monotonicity(const RunRecord& run, const MonotonicityOptions& options = {});

/// r1 <= rho_- <= L0/2, rho_+ <= L0, L >= aA and the Osserman deficit bound
/// sqrt(Delta) >= |L - A a coth(a rho_-/2)| on every record that carries radii.
Report check_radius_bounds(const SurfaceProfile& surface, const RunRecord& run);

/// kappa_min(t) >= min(kappa_min(0), a) - 1e-6 over the run.
Report check_convexity(const RunRecord& run);

/// Lower bound r1 = (2/a) acoth((L0 + sqrt(Delta0)) / (A0 a)) for the inner radius.
double inner_radius_lower_bound(double length0, double area0, double a);

struct EscapeCondition {
  bool satisfied = false;
  double lhs = 0.0;  // A0
  double rhs = 0.0;  // (2 pi / b^2)(cosh((2b/a) acoth((sqrt(Delta0) + L0)/(A0 a))) - 1)
  double margin = 0.0;
};

/// Sufficient condition on the initial length and area for the flow to stay
/// in a compact region. Throws DomainError if the acoth argument is <= 1.
EscapeCondition check_escape_condition(const SurfaceProfile& surface, double length0,
                                       double area0);

struct ExponentialFit {
  double rate = 0.0;
  double r_squared = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log|value| against t over the samples accepted by
/// `in_window`. Throws InconclusiveError with fewer than 10 samples in the
/// window or if the values change sign there.
ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& value,
                               const std::function<bool(double)>& in_window);

/// Tangent, normal and mixed Hessian comparison inequalities for the distance
/// function from p0 at every sample of the curve.
Report check_hessian_comparison(const SurfaceProfile& surface, const DiscreteCurve& curve,
                                const SurfacePoint& p0);

/// Max norm over samples of dkappa/dt - [d_s^2 kappa - (h - kappa)(K + kappa^2)],
/// with the time derivative taken as the centred difference of the curvature of
/// three states that are `dt` apart and move along the normal only.
double kappa_evolution_residual(const SurfaceProfile& surface, const DiscreteCurve& before,
                                const DiscreteCurve& middle, const DiscreteCurve& after,
                                double dt, double alpha);

// Spectrum ---------------------------------------------------------------------

/// lambda_i = (-i^2 + psi(r)) / phi(r)^2.
double predicted_rate(const SurfaceProfile& surface, double radius, int mode);

struct SpectrumEntry {
  int mode = 0;
  double predicted = 0.0;
  double fitted = 0.0;
  double relative_error = 0.0;  // |fitted - predicted| / |predicted|, absolute when predicted = 0
  double r_squared = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  bool whole_run_fit = false;
};

struct SpectrumReport {
  std::string surface_id;
  double radius = 0.0;
  std::vector<SpectrumEntry> entries;  // sorted by mode

  std::string to_json() const;
};

}  // namespace pinchflow
