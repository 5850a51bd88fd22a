#include "pinchflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pinchflow/errors.hpp"
#include "pinchflow/periodic.hpp"

namespace pinchflow {

namespace {


bool is_even_integer(double x) { return x >= 0.0 && std::fmod(x, 2.0) == 0.0; }

// h with the optional area feedback. The correction lowers h when the area has
// grown, since dA/dt = (h - mean kappa) L for alpha = 0.
double with_feedback(double h, const FlowConfig& config, double length, double area,
                     double area0) {
  if (config.area_feedback_gain <= 0.0 || config.alpha != 0.0) return h;
  return h - config.area_feedback_gain * (area - area0) / length;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

std::string to_string(Scheme scheme) {
  return scheme == Scheme::explicit_rk4 ? "explicit_rk4" : "semi_implicit_graph";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "explicit_rk4") return Scheme::explicit_rk4;
  if (name == "semi_implicit_graph") return Scheme::semi_implicit_graph;
  throw ParameterError("unknown scheme '" + name + "'");
}

std::string to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::completed: return "completed";
    case HaltReason::converged: return "converged";
    case HaltReason::blow_up: return "blow-up";
    case HaltReason::escape: return "escape";
    case HaltReason::embeddedness_loss: return "embeddedness-loss";
    case HaltReason::graph_breakdown: return "graph-breakdown";
  }
  return "completed";
}

HaltReason halt_reason_from_string(const std::string& name) {
  for (HaltReason r : {HaltReason::completed, HaltReason::converged, HaltReason::blow_up,
                       HaltReason::escape, HaltReason::embeddedness_loss,
                       HaltReason::graph_breakdown}) {
    if (to_string(r) == name) return r;
  }
  throw ParameterError("unknown halt reason '" + name + "'");
}

bool is_singular(HaltReason reason) {
  return reason == HaltReason::blow_up || reason == HaltReason::escape ||
         reason == HaltReason::embeddedness_loss;
}

void validate(const FlowConfig& config) {
  if (!(config.alpha >= 0.0)) throw ParameterError("alpha must be non-negative");
  if (const auto* f = std::get_if<FixedStep>(&config.step); f && !(f->dt > 0.0))
    throw ParameterError("fixed time step must be positive");
  if (const auto* c = std::get_if<CflStep>(&config.step);
      c && !(c->safety > 0.0 && c->safety <= 1.0))
    throw ParameterError("cfl safety factor must lie in (0, 1]");
  if (config.redistribution_stride < 0) throw ParameterError("redistribution stride must be >= 0");
  if (!(config.area_feedback_gain >= 0.0)) throw ParameterError("area feedback gain must be >= 0");
  if (!(config.t_end > 0.0)) throw ParameterError("t_end must be positive");
  if (config.max_steps <= 0) throw ParameterError("max_steps must be positive");
  if (config.embeddedness_stride <= 0) throw ParameterError("embeddedness stride must be positive");
  if (config.diagnostic_stride <= 0) throw ParameterError("diagnostic stride must be positive");
  if (config.snapshot_stride < 0) throw ParameterError("snapshot stride must be >= 0");
  if (!(config.slope_ceiling > 0.0)) throw ParameterError("slope ceiling must be positive");
  if (config.kappa_ceiling && !(*config.kappa_ceiling > 0.0))
    throw ParameterError("curvature ceiling must be positive");
  if (!(config.convergence_tolerance > 0.0) || config.convergence_strides <= 0)
    throw ParameterError("convergence rule needs a positive tolerance and stride count");
}

double global_term(std::span<const double> kappa, std::span<const double> weights, double alpha) {
  if (kappa.size() != weights.size() || kappa.empty())
    throw ParameterError("curvature and weights must have equal, non-zero length");
  double num = 0.0, den = 0.0;
  if (alpha == 0.0) {
    for (std::size_t j = 0; j < kappa.size(); ++j) {
      num += kappa[j] * weights[j];
      den += weights[j];
    }
    return num / den;
  }
  if (!is_even_integer(alpha)) {
    for (double k : kappa) {
      if (!(k > 0.0))
        throw DomainError("global term with alpha=" + std::to_string(alpha) +
                          " needs positive curvature");
    }
  }
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    const double p = alpha == 1.0 ? kappa[j] : std::pow(kappa[j], alpha);
    num += p * kappa[j] * weights[j];
    den += p * weights[j];
  }
  if (den == 0.0) throw DomainError("global term denominator vanishes");
  return num / den;
}

double global_term(const DiscreteCurve& curve, double alpha) {
  return global_term(curve.curvature(), curve.ds(), alpha);
}

std::vector<double> volume_element_weights(const SurfaceProfile& surface,
                                           const RadialGraph& graph) {
  const double du = graph.spacing();
  const std::vector<double> ru = periodic::first_derivative(graph.r(), du);
  std::vector<double> w(graph.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double phi = surface.phi(graph.r()[j]);
    const double v = std::hypot(ru[j], phi);
    w[j] = (phi * phi / v + ru[j] / v * ru[j]) * du;
  }
  return w;
}

double step_size(const FlowConfig& config, const DiscreteCurve& curve) {
  if (const auto* f = std::get_if<FixedStep>(&config.step)) return f->dt;
  const double sigma = std::get<CflStep>(config.step).safety;
  const auto ds = curve.ds();
  const double h = *std::min_element(ds.begin(), ds.end());
  const double dt = sigma * h * h / 2.0;
  return config.scheme == Scheme::semi_implicit_graph ? kSemiImplicitCflFactor * dt : dt;
}

DiscreteCurve step_parametric(const SurfaceProfile& surface, const DiscreteCurve& curve,
                              double dt, const FlowConfig& config, double area0) {
  const std::size_t n = curve.size();
  auto velocity = [&](const DiscreteCurve& c, std::vector<double>& vr, std::vector<double>& vu) {
    const auto kappa = c.curvature();
    double h = global_term(kappa, c.ds(), config.alpha);
    if (config.area_feedback_gain > 0.0) {
      const LengthArea la = length_area(surface, c);
      h = with_feedback(h, config, la.length, la.area, area0);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const TangentVector nj = c.normal(j);
      vr[j] = (h - kappa[j]) * nj.dr;
      vu[j] = (h - kappa[j]) * nj.du;
    }
  };
  const std::vector<double> r0(curve.r().begin(), curve.r().end());
  const std::vector<double> u0(curve.u().begin(), curve.u().end());
  std::vector<double> k1r(n), k1u(n), k2r(n), k2u(n), k3r(n), k3u(n), k4r(n), k4u(n);
  std::vector<double> r(n), u(n);
  auto stage = [&](const std::vector<double>& kr, const std::vector<double>& ku, double c) {
    for (std::size_t j = 0; j < n; ++j) {
      r[j] = r0[j] + c * dt * kr[j];
      u[j] = u0[j] + c * dt * ku[j];
    }
    return DiscreteCurve::from_samples(surface, r, u);
  };
  velocity(curve, k1r, k1u);
  velocity(stage(k1r, k1u, 0.5), k2r, k2u);
  velocity(stage(k2r, k2u, 0.5), k3r, k3u);
  velocity(stage(k3r, k3u, 1.0), k4r, k4u);
  for (std::size_t j = 0; j < n; ++j) {
    r[j] = r0[j] + dt / 6.0 * (k1r[j] + 2.0 * k2r[j] + 2.0 * k3r[j] + k4r[j]);
    u[j] = u0[j] + dt / 6.0 * (k1u[j] + 2.0 * k2u[j] + 2.0 * k3u[j] + k4u[j]);
  }
  return DiscreteCurve::from_samples(surface, std::move(r), std::move(u));
}

RadialGraph step_graph(const SurfaceProfile& surface, const RadialGraph& graph, double dt,
                       const FlowConfig& config, double area0) {
  const std::size_t n = graph.size();
  const double du = graph.spacing();
  const auto r = graph.r();
  const std::vector<double> ru = periodic::first_derivative(r, du);
  const std::vector<double> ruu = periodic::second_derivative(r, du);

  std::vector<double> v(n), phi(n), dphi(n), kappa(n), weights(n);
  double length = 0.0, area = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const WarpSample w = surface.warp(r[j]);
    phi[j] = w.phi;
    dphi[j] = w.dphi;
    v[j] = std::hypot(ru[j], w.phi);
    const double slope2 = ru[j] * ru[j] / (v[j] * v[j]);
    kappa[j] = -(w.phi / (v[j] * v[j] * v[j])) * ruu[j] + (w.dphi / v[j]) * (1.0 + slope2);
    weights[j] = v[j] * du;
    length += weights[j];
    if (config.area_feedback_gain > 0.0) area += surface.area_primitive(r[j]) * du;
  }
  const double h = with_feedback(global_term(kappa, weights, config.alpha), config, length, area,
                                 area0);

  std::vector<double> lower(n), diag(n), upper(n), rhs(n);
  const double inv_du2 = 1.0 / (du * du);
  for (std::size_t j = 0; j < n; ++j) {
    const double coeff = 1.0 / (v[j] * v[j]);
    const double rm = r[(j + n - 1) % n];
    const double rp = r[(j + 1) % n];
    const double ruu2 = (rm - 2.0 * r[j] + rp) * inv_du2;
    const double slope2 = ru[j] * ru[j] / (v[j] * v[j]);
    const double explicit_part =
        (v[j] / phi[j]) * h - (dphi[j] / phi[j]) * (1.0 + slope2) + coeff * (ruu[j] - ruu2);
    const double off = -dt * coeff * inv_du2;
    lower[j] = off;
    upper[j] = off;
    diag[j] = 1.0 - 2.0 * off;
    rhs[j] = r[j] + dt * explicit_part;
  }
  return RadialGraph(periodic::solve_cyclic_tridiagonal(lower, diag, upper, rhs));
}

namespace {

struct Stepper {
  const SurfaceProfile& surface;
  const FlowConfig& config;
  std::optional<DiscreteCurve> curve;
  std::optional<RadialGraph> graph;

  const DiscreteCurve& current() const { return *curve; }

  void set_graph(RadialGraph g) {
    curve = g.to_curve(surface);
    graph = std::move(g);
  }

  void advance(double dt, double area0) {
    if (graph) {
      set_graph(step_graph(surface, *graph, dt, config, area0));
    } else {
      curve = step_parametric(surface, *curve, dt, config, area0);
    }
  }

  CurveState state() const {
    if (graph) return *graph;
    return *curve;
  }
};

double max_graph_slope(const RadialGraph& g) {
  return max_abs(periodic::first_derivative(g.r(), g.spacing()));
}

}  // namespace

RunRecord run(const SurfaceProfile& surface, const CurveState& initial, const FlowConfig& config,
              const StepObserver& observer) {
  validate(config);
  Stepper stepper{surface, config, std::nullopt, std::nullopt};
  if (config.scheme == Scheme::semi_implicit_graph) {
    const auto* g = std::get_if<RadialGraph>(&initial);
    if (!g) throw ParameterError("the semi-implicit graph scheme needs radial-graph initial data");
    stepper.set_graph(*g);
  } else if (const auto* g = std::get_if<RadialGraph>(&initial)) {
    stepper.curve = g->to_curve(surface);
  } else {
    stepper.curve = std::get<DiscreteCurve>(initial);
  }

  RunRecord rec;
  rec.surface_id = surface.id();
  rec.alpha = config.alpha;
  rec.a = surface.a();
  rec.b = surface.b();

  const DiscreteCurve& c0 = stepper.current();
  const double area0 = length_area(surface, c0).area;
  const double kappa_ceiling =
      config.kappa_ceiling.value_or(1e3 * std::max(max_abs(c0.curvature()), surface.b()));
  const double escape_ceiling =
      config.escape_ceiling.value_or(surface.r_max() - 5.0 * surface.grid_step());
  rec.convex_start = c0.kappa_min() > 0.0;
  const double convexity_floor = std::min(c0.kappa_min(), surface.a()) - 1e-6;

  long step = 0;
  double t = 0.0;
  double last_dt = 0.0;
  long last_record_step = -1;
  long last_snapshot_step = -1;
  int converged_strides = 0;

  auto emit = [&](bool snapshot) {
    const DiscreteCurve& c = stepper.current();
    DiagnosticsRecord d = make_record(surface, c, config.alpha, step, t, last_dt);
    if (rec.convex_start) d.convexity_ok = d.kappa_min >= convexity_floor;
    if (snapshot) {
      if (config.compute_radii) attach_radii(surface, c, d, config.radii_search);
      rec.snapshots.push_back(Snapshot{step, t, c});
      last_snapshot_step = step;
    }
    rec.records.push_back(d);
    last_record_step = step;
    return d;
  };

  emit(true);
  const double t_stop = config.t_end * (1.0 - 1e-14);
  while (t < t_stop && step < config.max_steps) {
    double dt = step_size(config, stepper.current());
    if (t + dt >= config.t_end || config.t_end - (t + dt) < 1e-9 * dt) dt = config.t_end - t;
    try {
      stepper.advance(dt, area0);
    } catch (const Error& e) {
      rec.halt = HaltReason::blow_up;
      rec.halt_detail = std::string("step failed: ") + e.what();
      break;
    }
    ++step;
    t += dt;
    last_dt = dt;

    const DiscreteCurve& c = stepper.current();
    const double kabs = max_abs(c.curvature());
    const auto rs = c.r();
    const double rmax = *std::max_element(rs.begin(), rs.end());
    const double rmin = *std::min_element(rs.begin(), rs.end());
    if (!(kabs <= kappa_ceiling)) {
      rec.halt = HaltReason::blow_up;
      rec.halt_detail = "max |kappa| = " + std::to_string(kabs) + " exceeds ceiling " +
                        std::to_string(kappa_ceiling);
    } else if (rmax > escape_ceiling) {
      rec.halt = HaltReason::escape;
      rec.halt_detail = "r_max = " + std::to_string(rmax) + ", r_min = " + std::to_string(rmin);
    } else if (step % config.embeddedness_stride == 0 && !is_embedded(c)) {
      rec.halt = HaltReason::embeddedness_loss;
      rec.halt_detail = "self-intersection detected";
    } else if (stepper.graph && max_graph_slope(*stepper.graph) > config.slope_ceiling) {
      rec.halt = HaltReason::graph_breakdown;
      rec.halt_detail = "graph slope exceeds " + std::to_string(config.slope_ceiling);
    }
    if (rec.halt != HaltReason::completed) {
      break;
    }

    if (!stepper.graph && config.redistribution_stride > 0 &&
        step % config.redistribution_stride == 0)
      stepper.curve = redistribute(surface, *stepper.curve);

    if (observer)
      observer(FlowState{t, step, stepper.state(), global_term(stepper.current(), config.alpha)});

    if (step % config.diagnostic_stride == 0) {
      const bool snap = config.snapshot_stride > 0 && step % config.snapshot_stride == 0;
      const DiagnosticsRecord d = emit(snap);
      const auto rs_now = stepper.current().r();
      double mean = 0.0;
      for (double r : rs_now) mean += r;
      mean /= static_cast<double>(rs_now.size());
      double dev = 0.0;
      for (double r : rs_now) dev = std::max(dev, std::abs(r - mean));
      const double tol = config.convergence_tolerance;
      converged_strides =
          d.sup_kappa_minus_h < tol && dev < tol * mean ? converged_strides + 1 : 0;
      if (config.stop_on_convergence && converged_strides >= config.convergence_strides) {
        rec.halt = HaltReason::converged;
        rec.halt_detail = "sup|kappa-h| and max|r-mean r| below tolerance for " +
                          std::to_string(config.convergence_strides) + " strides";
        break;
      }
    } else if (config.snapshot_stride > 0 && step % config.snapshot_stride == 0) {
      emit(true);
    }
  }
  if (last_record_step != step) {
    emit(last_snapshot_step != step);
  } else if (last_snapshot_step != step) {
    // Final record exists without its snapshot: replace it so radii are attached.
    rec.records.pop_back();
    emit(true);
  }
  rec.steps = step;
  rec.final_time = t;
  return rec;
}

double mode_amplitude(const RadialGraph& graph, int mode) {
  const double mean = graph.mean_radius();
  std::vector<double> dev(graph.r().begin(), graph.r().end());
  for (double& x : dev) x -= mean;
  return periodic::cosine_coefficient(dev, mode);
}

double suggested_duration(double predicted_rate) {
  if (std::abs(predicted_rate) < 1e-3) return 5.0;
  return std::clamp(std::log(1e4) / std::abs(predicted_rate), 2.0, 60.0);
}

SpectrumEntry mode_experiment(const SurfaceProfile& surface, const ModeExperiment& experiment,
                              const FlowConfig& config) {
  if (experiment.mode < 1) throw ParameterError("mode must be >= 1");
  if (!(experiment.amplitude > 0.0) || experiment.amplitude > 1e-2 * experiment.radius)
    throw ParameterError("mode amplitude must lie in (0, 1e-2 * radius]");
  const RadialGraph initial = make_initial_graph(
      surface, PerturbedCircleCurve{experiment.radius, experiment.mode, experiment.amplitude},
      experiment.samples);

  FlowConfig cfg = config;
  cfg.scheme = Scheme::semi_implicit_graph;
  cfg.stop_on_convergence = false;
  cfg.compute_radii = false;
  cfg.snapshot_stride = 0;

  std::vector<double> times{0.0};
  std::vector<double> amps{mode_amplitude(initial, experiment.mode)};
  const RunRecord rec = run(surface, initial, cfg, [&](const FlowState& s) {
    times.push_back(s.t);
    amps.push_back(mode_amplitude(std::get<RadialGraph>(s.curve), experiment.mode));
  });
  if (rec.halt != HaltReason::completed)
    throw InconclusiveError("mode run halted: " + to_string(rec.halt) + " (" + rec.halt_detail +
                            ")");

  const double eps = experiment.amplitude;
  SpectrumEntry entry;
  entry.mode = experiment.mode;
  entry.predicted = predicted_rate(surface, experiment.radius, experiment.mode);
  double smallest = std::numeric_limits<double>::infinity();
  for (double a : amps) smallest = std::min(smallest, std::abs(a));
  ExponentialFit fit;
  if (smallest >= 0.5 * eps) {
    entry.whole_run_fit = true;
    fit = fit_exponential(times, amps, [&](double a) { return std::abs(a) > 1e-6 * eps; });
  } else {
    fit = fit_exponential(times, amps, [&](double a) {
      return std::abs(a) > 1e-6 * eps && std::abs(a) < 0.5 * eps;
    });
  }
  entry.fitted = fit.rate;
  entry.r_squared = fit.r_squared;
  entry.window_begin = fit.t_begin;
  entry.window_end = fit.t_end;
  const double diff = std::abs(entry.fitted - entry.predicted);
  entry.relative_error = entry.predicted != 0.0 ? diff / std::abs(entry.predicted) : diff;
  return entry;
}

}  // namespace pinchflow
