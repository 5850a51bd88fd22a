#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pinchflow/curve.hpp"
#include "pinchflow/diagnostics.hpp"
#include "pinchflow/geodesics.hpp"
#include "pinchflow/record.hpp"
#include "pinchflow/surface.hpp"

namespace pinchflow {

enum class Scheme { explicit_rk4, semi_implicit_graph };
std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Parabolic stability bound min(ds)^2 / 2 of the explicit scheme is scaled by
/// this factor for the semi-implicit scheme under the cfl policy.
inline constexpr double kSemiImplicitCflFactor = 10.0;

struct FixedStep {
  double dt = 1e-4;
};
struct CflStep {
  double safety = 0.8;
};
using StepPolicy = std::variant<FixedStep, CflStep>;

struct FlowConfig {
  double alpha = 0.0;
  Scheme scheme = Scheme::explicit_rk4;
  StepPolicy step = CflStep{};
  int redistribution_stride = 0;  // 0 = off
  double area_feedback_gain = 0.0;
  double t_end = 1.0;
  long max_steps = 50'000'000;

  std::optional<double> kappa_ceiling;   // default 1e3 * max(kappa_max(0), b)
  std::optional<double> escape_ceiling;  // default r_max - 5 grid_step
  int embeddedness_stride = 50;
  double slope_ceiling = 1e3;  // |dr/du| limit of the graph scheme

  int diagnostic_stride = 10;
  int snapshot_stride = 0;  // 0 = initial and final snapshots only
  bool compute_radii = false;
  RadiiSearch radii_search{};

  bool stop_on_convergence = true;
  double convergence_tolerance = 1e-6;
  int convergence_strides = 100;
};

/// Throws ParameterError on invalid fields.
void validate(const FlowConfig& config);

using CurveState = std::variant<DiscreteCurve, RadialGraph>;

struct FlowState {
  double t = 0.0;
  long step = 0;
  CurveState curve;
  double h = 0.0;
};

/// h = sum kappa^(1+alpha) ds / sum kappa^alpha ds with the trapezoidal weights
/// of length_area. Throws DomainError if kappa <= 0 somewhere and alpha is not
/// a non-negative even integer.
double global_term(std::span<const double> kappa, std::span<const double> weights, double alpha);
double global_term(const DiscreteCurve& curve, double alpha);

/// Weights of the volume element (phi^2/v) du + (r_u/v) dr pulled back to a
/// radial graph. On the graph dr = r_u du, so they coincide with v du.
std::vector<double> volume_element_weights(const SurfaceProfile& surface, const RadialGraph& graph);

/// Explicit time step allowed by the policy for the current curve.
double step_size(const FlowConfig& config, const DiscreteCurve& curve);

/// One classical RK4 step of (r, u)_t = (h - kappa) N with h recomputed at
/// every stage. `area0` feeds the optional area feedback.
DiscreteCurve step_parametric(const SurfaceProfile& surface, const DiscreteCurve& curve,
                              double dt, const FlowConfig& config, double area0);

/// One semi-implicit step of r_t = (v/phi) h + r_uu / v^2 - (phi'/phi)(1 + r_u^2/v^2).
/// The second-order diffusion stencil with coefficients frozen at the current
/// state is implicit; the difference to the fourth-order stencil and every
/// other term are explicit.
RadialGraph step_graph(const SurfaceProfile& surface, const RadialGraph& graph, double dt,
                       const FlowConfig& config, double area0);

/// Called after every accepted step.
using StepObserver = std::function<void(const FlowState&)>;

RunRecord run(const SurfaceProfile& surface, const CurveState& initial, const FlowConfig& config,
              const StepObserver& observer = {});

/// Amplitude (1/pi) sum (r - mean r) cos(i u) du of a radial graph.
double mode_amplitude(const RadialGraph& graph, int mode);

struct ModeExperiment {
  double radius = 1.0;
  int mode = 2;
  double amplitude = 1e-3;
  std::size_t samples = 256;
};

/// Evolves r = radius + amplitude cos(mode u) with the graph scheme up to
/// config.t_end and fits the decay of the mode amplitude over the window
/// 1e-6 eps < |a_i| < 0.5 eps. If the amplitude never drops below 0.5 eps (a
/// neutral mode), the whole run is fitted and the entry is flagged.
SpectrumEntry mode_experiment(const SurfaceProfile& surface, const ModeExperiment& experiment,
                              const FlowConfig& config);

/// Run length long enough for the predicted rate to decay the mode by 1e-4,
/// clamped to [2, 60].
double suggested_duration(double predicted_rate);

}  // namespace pinchflow
