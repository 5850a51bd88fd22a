#include "pinchflow/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pinchflow/errors.hpp"

namespace pinchflow {

namespace {

using nlohmann::json;

// Reads the members of one JSON object and rejects the ones nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParameterError(path_ + " must be a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json* raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ParameterError(where(key) + " must be a number");
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key, std::optional<double> fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (v->is_null()) return std::nullopt;
    if (!v->is_number()) throw ParameterError(where(key) + " must be a number or null");
    return v->get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ParameterError(where(key) + " must be an integer");
    return v->get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ParameterError(where(key) + " must be true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ParameterError(where(key) + " must be a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = raw(key);
    if (!v) return {};
    if (!v->is_array()) throw ParameterError(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) throw ParameterError(where(key) + " must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::optional<ObjectReader> object(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    return ObjectReader(*v, where(key));
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ParameterError("unknown key '" + where(it.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

int positive_int(long long v, const std::string& what, long long minimum = 0) {
  if (v < minimum || v > 1'000'000'000) throw ParameterError(what + " out of range");
  return static_cast<int>(v);
}

std::map<int, double> fourier_terms(ObjectReader& parent, const std::string& key) {
  std::map<int, double> out;
  const json* v = parent.raw(key);
  if (!v) return out;
  if (!v->is_object())
    throw ParameterError(parent.where(key) + " must map mode numbers to coefficients");
  for (auto it = v->begin(); it != v->end(); ++it) {
    int mode = 0;
    try {
      std::size_t used = 0;
      mode = std::stoi(it.key(), &used);
      if (used != it.key().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParameterError(parent.where(key) + " key '" + it.key() + "' is not a mode number");
    }
    if (mode < 1) throw ParameterError(parent.where(key) + " modes must be >= 1");
    if (!it.value().is_number())
      throw ParameterError(parent.where(key) + "." + it.key() + " must be a number");
    out[mode] = it.value().get<double>();
  }
  return out;
}

SurfaceSpec parse_surface(ObjectReader r) {
  SurfaceSpec s;
  s.family = profile_family_from_string(r.string("family", to_string(s.family)));
  s.a = r.number("a", s.a);
  s.b = r.number("b", s.family == ProfileFamily::constant_curvature ? s.a : 2.0 * s.a);
  s.c = r.number("c", s.c);
  s.r_max = r.optional_number("r_max", std::nullopt);
  s.grid_step = r.number("grid_step", s.grid_step);
  if (auto t = r.object("table")) {
    s.table_r = t->numbers("r");
    s.table_phi = t->numbers("phi");
    s.table_dphi = t->numbers("dphi");
    s.table_ddphi = t->numbers("ddphi");
    t->finish();
  } else if (s.family == ProfileFamily::tabulated) {
    throw ParameterError("scenario.surface.table is required for the tabulated family");
  }
  r.finish();
  return s;
}

std::pair<InitialCurve, std::size_t> parse_curve(ObjectReader r) {
  const std::string kind = r.string("kind", "circle");
  const auto samples = static_cast<std::size_t>(
      positive_int(r.integer("samples", 256), "scenario.initial_curve.samples", 1));
  InitialCurve curve;
  if (kind == "circle") {
    curve = CircleCurve{r.number("radius", 1.0)};
  } else if (kind == "perturbed_circle") {
    PerturbedCircleCurve p;
    p.radius = r.number("radius", p.radius);
    p.mode = positive_int(r.integer("mode", p.mode), "scenario.initial_curve.mode", 1);
    p.amplitude = r.number("amplitude", p.amplitude);
    curve = p;
  } else if (kind == "fourier_graph") {
    FourierGraphCurve f;
    f.c0 = r.number("c0", f.c0);
    f.cos_terms = fourier_terms(r, "cos");
    f.sin_terms = fourier_terms(r, "sin");
    curve = f;
  } else if (kind == "chart_ellipse") {
    ChartEllipseCurve e;
    e.semi_x = r.number("semi_x", e.semi_x);
    e.semi_y = r.number("semi_y", e.semi_y);
    e.center_x = r.number("center_x", e.center_x);
    e.center_y = r.number("center_y", e.center_y);
    curve = e;
  } else {
    throw ParameterError("unknown initial curve kind '" + kind + "'");
  }
  r.finish();
  return {curve, samples};
}

void parse_flow(ObjectReader r, FlowConfig& f) {
  f.alpha = r.number("alpha", f.alpha);
  f.scheme = scheme_from_string(r.string("scheme", to_string(f.scheme)));
  if (auto p = r.object("dt_policy")) {
    const std::string kind = p->string("kind", "cfl");
    if (kind == "cfl") {
      f.step = CflStep{p->number("safety", CflStep{}.safety)};
    } else if (kind == "fixed") {
      if (!p->has("dt")) throw ParameterError("scenario.flow.dt_policy.dt is required for fixed steps");
      f.step = FixedStep{p->number("dt", 0.0)};
    } else {
      throw ParameterError("unknown dt policy '" + kind + "'");
    }
    p->finish();
  }
  f.redistribution_stride =
      positive_int(r.integer("redistribution_stride", f.redistribution_stride),
                   "scenario.flow.redistribution_stride");
  f.area_feedback_gain = r.number("area_feedback_gain", f.area_feedback_gain);
  f.t_end = r.number("t_end", f.t_end);
  f.max_steps = r.integer("max_steps", f.max_steps);
  f.kappa_ceiling = r.optional_number("kappa_ceiling", f.kappa_ceiling);
  f.escape_ceiling = r.optional_number("escape_ceiling", f.escape_ceiling);
  f.embeddedness_stride = positive_int(r.integer("embeddedness_stride", f.embeddedness_stride),
                                       "scenario.flow.embeddedness_stride", 1);
  f.slope_ceiling = r.number("slope_ceiling", f.slope_ceiling);
  f.stop_on_convergence = r.boolean("stop_on_convergence", f.stop_on_convergence);
  f.convergence_tolerance = r.number("convergence_tolerance", f.convergence_tolerance);
  f.convergence_strides = positive_int(r.integer("convergence_strides", f.convergence_strides),
                                       "scenario.flow.convergence_strides", 1);
  r.finish();
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("malformed scenario JSON: ") + e.what());
  }
  ObjectReader r(root, "scenario");
  Scenario s;
  if (!r.has("spec_version")) throw ParameterError("scenario.spec_version is required");
  s.spec_version = static_cast<int>(r.integer("spec_version", 0));
  if (s.spec_version != kScenarioVersion)
    throw ParameterError("unsupported spec_version " + std::to_string(s.spec_version) +
                         " (expected " + std::to_string(kScenarioVersion) + ")");
  const long long seed = r.integer("seed", 0);
  if (seed < 0) throw ParameterError("scenario.seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);

  if (auto o = r.object("surface")) s.surface = parse_surface(*o);
  if (auto o = r.object("initial_curve")) std::tie(s.curve, s.samples) = parse_curve(*o);
  if (auto o = r.object("flow")) parse_flow(*o, s.flow);
  if (auto o = r.object("diagnostics")) {
    s.diagnostics.stride =
        positive_int(o->integer("stride", s.diagnostics.stride), "scenario.diagnostics.stride", 1);
    s.diagnostics.radii = o->boolean("radii", s.diagnostics.radii);
    s.diagnostics.search.grid = positive_int(o->integer("radii_grid", s.diagnostics.search.grid),
                                             "scenario.diagnostics.radii_grid", 2);
    s.diagnostics.search.budget = positive_int(
        o->integer("radii_budget", s.diagnostics.search.budget), "scenario.diagnostics.radii_budget", 10);
    s.diagnostics.search.max_curve_samples = static_cast<std::size_t>(
        positive_int(o->integer("radii_samples", static_cast<long long>(s.diagnostics.search.max_curve_samples)),
                     "scenario.diagnostics.radii_samples", 16));
    o->finish();
  }
  if (auto o = r.object("output")) {
    s.output.directory = o->string("directory", s.output.directory);
    s.output.snapshot_stride = positive_int(o->integer("snapshot_stride", s.output.snapshot_stride),
                                            "scenario.output.snapshot_stride");
    s.output.svg = o->boolean("svg", s.output.svg);
    s.output.svg_size = positive_int(o->integer("svg_size", s.output.svg_size),
                                     "scenario.output.svg_size", 64);
    o->finish();
  }
  if (auto o = r.object("spectrum")) {
    s.spectrum.radius = o->number("radius", s.spectrum.radius);
    if (o->has("modes")) {
      s.spectrum.modes.clear();
      for (double m : o->numbers("modes")) {
        if (m < 1.0 || m != std::floor(m)) throw ParameterError("scenario.spectrum.modes must be integers >= 1");
        s.spectrum.modes.push_back(static_cast<int>(m));
      }
    } else {
      o->raw("modes");
    }
    s.spectrum.amplitude = o->number("amplitude", s.spectrum.amplitude);
    s.spectrum.samples = static_cast<std::size_t>(positive_int(
        o->integer("samples", static_cast<long long>(s.spectrum.samples)), "scenario.spectrum.samples", 16));
    s.spectrum.t_end = o->optional_number("t_end", s.spectrum.t_end);
    o->finish();
  }
  r.finish();

  s.flow.diagnostic_stride = s.diagnostics.stride;
  s.flow.compute_radii = s.diagnostics.radii;
  s.flow.radii_search = s.diagnostics.search;
  s.flow.snapshot_stride = s.output.snapshot_stride;
  validate(s.flow);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string to_json(const Scenario& s) {
  json root;
  root["spec_version"] = s.spec_version;
  root["seed"] = s.seed;

  json surface;
  surface["family"] = to_string(s.surface.family);
  surface["a"] = s.surface.a;
  surface["b"] = s.surface.b;
  surface["c"] = s.surface.c;
  surface["r_max"] = s.surface.r_max ? json(*s.surface.r_max) : json(nullptr);
  surface["grid_step"] = s.surface.grid_step;
  if (s.surface.family == ProfileFamily::tabulated) {
    surface["table"] = {{"r", s.surface.table_r},
                        {"phi", s.surface.table_phi},
                        {"dphi", s.surface.table_dphi},
                        {"ddphi", s.surface.table_ddphi}};
  }
  root["surface"] = surface;

  json curve;
  curve["samples"] = s.samples;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CircleCurve>) {
          curve["kind"] = "circle";
          curve["radius"] = c.radius;
        } else if constexpr (std::is_same_v<T, PerturbedCircleCurve>) {
          curve["kind"] = "perturbed_circle";
          curve["radius"] = c.radius;
          curve["mode"] = c.mode;
          curve["amplitude"] = c.amplitude;
        } else if constexpr (std::is_same_v<T, FourierGraphCurve>) {
          curve["kind"] = "fourier_graph";
          curve["c0"] = c.c0;
          json cs = json::object(), ss = json::object();
          for (const auto& [k, v] : c.cos_terms) cs[std::to_string(k)] = v;
          for (const auto& [k, v] : c.sin_terms) ss[std::to_string(k)] = v;
          curve["cos"] = cs;
          curve["sin"] = ss;
        } else {
          curve["kind"] = "chart_ellipse";
          curve["semi_x"] = c.semi_x;
          curve["semi_y"] = c.semi_y;
          curve["center_x"] = c.center_x;
          curve["center_y"] = c.center_y;
        }
      },
      s.curve);
  root["initial_curve"] = curve;

  const FlowConfig& f = s.flow;
  json flow;
  flow["alpha"] = f.alpha;
  flow["scheme"] = to_string(f.scheme);
  if (const auto* fixed = std::get_if<FixedStep>(&f.step)) {
    flow["dt_policy"] = {{"kind", "fixed"}, {"dt", fixed->dt}};
  } else {
    flow["dt_policy"] = {{"kind", "cfl"}, {"safety", std::get<CflStep>(f.step).safety}};
  }
  flow["redistribution_stride"] = f.redistribution_stride;
  flow["area_feedback_gain"] = f.area_feedback_gain;
  flow["t_end"] = f.t_end;
  flow["max_steps"] = f.max_steps;
  flow["kappa_ceiling"] = f.kappa_ceiling ? json(*f.kappa_ceiling) : json(nullptr);
  flow["escape_ceiling"] = f.escape_ceiling ? json(*f.escape_ceiling) : json(nullptr);
  flow["embeddedness_stride"] = f.embeddedness_stride;
  flow["slope_ceiling"] = f.slope_ceiling;
  flow["stop_on_convergence"] = f.stop_on_convergence;
  flow["convergence_tolerance"] = f.convergence_tolerance;
  flow["convergence_strides"] = f.convergence_strides;
  root["flow"] = flow;

  root["diagnostics"] = {{"stride", s.diagnostics.stride},
                         {"radii", s.diagnostics.radii},
                         {"radii_grid", s.diagnostics.search.grid},
                         {"radii_budget", s.diagnostics.search.budget},
                         {"radii_samples", s.diagnostics.search.max_curve_samples}};
  root["output"] = {{"directory", s.output.directory},
                    {"snapshot_stride", s.output.snapshot_stride},
                    {"svg", s.output.svg},
                    {"svg_size", s.output.svg_size}};
  root["spectrum"] = {{"radius", s.spectrum.radius},
                      {"modes", s.spectrum.modes},
                      {"amplitude", s.spectrum.amplitude},
                      {"samples", s.spectrum.samples},
                      {"t_end", s.spectrum.t_end ? json(*s.spectrum.t_end) : json(nullptr)}};
  return root.dump(2) + "\n";
}

SurfaceProfile build_surface(const SurfaceSpec& spec) {
  switch (spec.family) {
    case ProfileFamily::constant_curvature:
      if (spec.b != spec.a)
        throw ParameterError("constant curvature needs b == a (got a=" + std::to_string(spec.a) +
                             ", b=" + std::to_string(spec.b) + ")");
      return SurfaceProfile::constant_curvature(spec.a, spec.r_max, spec.grid_step);
    case ProfileFamily::tanh_pinch:
    case ProfileFamily::rational_pinch:
      if (!(spec.a > 0.0)) throw ParameterError("a must be positive");
      return SurfaceProfile::from_curvature(spec.family, spec.a, spec.b, spec.c,
                                            spec.r_max.value_or(20.0 / spec.a), spec.grid_step);
    case ProfileFamily::tabulated:
      return SurfaceProfile::from_table(spec.a, spec.b, spec.table_r, spec.table_phi,
                                        spec.table_dphi, spec.table_ddphi);
  }
  throw ParameterError("unknown surface family");
}

CurveState build_initial_state(const SurfaceProfile& surface, const Scenario& scenario) {
  if (scenario.flow.scheme == Scheme::semi_implicit_graph) {
    if (!is_graph_kind(scenario.curve))
      throw ParameterError("the semi-implicit graph scheme needs a radial-graph initial curve");
    return make_initial_graph(surface, scenario.curve, scenario.samples);
  }
  return make_initial_curve(surface, scenario.curve, scenario.samples);
}

}  // namespace pinchflow
