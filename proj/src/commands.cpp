#include "pinchflow/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pinchflow/diagnostics.hpp"
#include "pinchflow/errors.hpp"
#include "pinchflow/flow.hpp"
#include "pinchflow/output.hpp"
#include "pinchflow/scenario.hpp"

namespace pinchflow {

namespace fs = std::filesystem;
using nlohmann::json;

unsigned worker_count() {
  if (const char* env = std::getenv("HF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs job(i) for i in [0, n) on at most `workers` threads.
template <class Job>
void parallel_for(std::size_t n, unsigned workers, Job&& job) {
  const auto count = static_cast<unsigned>(std::min<std::size_t>(n, workers));
  if (count <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

json point_json(const SurfacePoint& p) {
  if (is_pole(p)) return "pole";
  const auto& c = std::get<ChartPoint>(p);
  return json::array({c.r, c.u});
}

std::string snapshot_name(long step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%08ld.csv", step);
  return buf;
}

json summary_json(const Scenario& scenario, const SurfaceProfile& surface, const RunRecord& rec,
                  const Report& report) {
  const auto& first = rec.records.front();
  const auto& last = rec.records.back();
  json s;
  s["spec_version"] = scenario.spec_version;
  s["seed"] = scenario.seed;
  s["surface"] = surface.id();
  s["a"] = rec.a;
  s["b"] = rec.b;
  s["alpha"] = rec.alpha;
  s["scheme"] = to_string(scenario.flow.scheme);
  s["halt_reason"] = to_string(rec.halt);
  s["halt_detail"] = rec.halt_detail;
  s["steps"] = rec.steps;
  s["final_time"] = rec.final_time;
  s["convex_start"] = rec.convex_start;
  s["initial"] = {{"L", first.length}, {"A", first.area}, {"Delta", first.deficit},
                  {"kappa_min", first.kappa_min}};
  s["final"] = {{"L", last.length},
                {"A", last.area},
                {"Delta", last.deficit},
                {"h", last.h},
                {"kappa_min", last.kappa_min},
                {"kappa_max", last.kappa_max},
                {"sup_kappa_minus_h", last.sup_kappa_minus_h},
                {"r_min", last.r_min},
                {"r_max", last.r_max}};
  s["relative_area_drift"] = std::abs(last.area - first.area) / std::abs(first.area);
  s["relative_length_drift"] = std::abs(last.length - first.length) / first.length;
  const double area0 = std::abs(first.area);
  try {
    s["inner_radius_lower_bound"] = inner_radius_lower_bound(first.length, area0, rec.a);
    const EscapeCondition e = check_escape_condition(surface, first.length, area0);
    s["escape_condition"] = {
        {"satisfied", e.satisfied}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"margin", e.margin}};
  } catch (const Error&) {
    s["inner_radius_lower_bound"] = nullptr;
    s["escape_condition"] = nullptr;
  }
  json radii = json::array();
  for (const auto& d : rec.records) {
    if (!d.rho_minus) continue;
    radii.push_back({{"step", d.step},
                     {"t", d.t},
                     {"rho_minus", *d.rho_minus},
                     {"rho_plus", *d.rho_plus},
                     {"accuracy", d.radii_accuracy.value_or(0.0)},
                     {"inner_center", point_json(*d.rho_minus_center)},
                     {"outer_center", point_json(*d.rho_plus_center)},
                     {"support_min", d.support_min ? json(*d.support_min) : json(nullptr)},
                     {"support_max", d.support_max ? json(*d.support_max) : json(nullptr)}});
  }
  s["radii"] = radii;
  s["snapshots"] = json::array();
  for (const auto& snap : rec.snapshots) s["snapshots"].push_back(snapshot_name(snap.step));
  s["checks"] = json::parse(report.to_json())["checks"];
  return s;
}

Report run_checks(const SurfaceProfile& surface, const RunRecord& rec) {
  Report report;
  if (rec.records.size() >= 2) report.append(check_monotonicity(rec));
  report.append(check_convexity(rec));
  report.append(check_radius_bounds(surface, rec));
  return report;
}

int run_one(const fs::path& scenario_path, const std::optional<fs::path>& out_dir,
            std::ostream& out, std::ostream& err) {
  Scenario scenario;
  std::optional<SurfaceProfile> surface;
  std::optional<CurveState> initial;
  fs::path dir;
  try {
    scenario = load_scenario(scenario_path.string());
    dir = out_dir.value_or(fs::path(scenario.output.directory));
    surface = build_surface(scenario.surface);
    initial = build_initial_state(*surface, scenario);
  } catch (const std::exception& e) {
    err << scenario_path.string() << ": " << e.what() << "\n";
    return kExitConfig;
  }

  RunRecord rec;
  try {
    rec = run(*surface, *initial, scenario.flow);
  } catch (const std::exception& e) {
    err << scenario_path.string() << ": " << e.what() << "\n";
    return kExitConfig;
  }
  const Report report = run_checks(*surface, rec);

  try {
    write_text(dir / "scenario.json", to_json(scenario));
    write_text(dir / "timeseries.csv", timeseries_csv(rec.records));
    for (const auto& snap : rec.snapshots)
      write_text(dir / "snapshots" / snapshot_name(snap.step), snapshot_csv(snap.curve));
    if (scenario.output.svg)
      write_text(dir / "curves.svg", chart_curves_svg(rec.snapshots, scenario.output.svg_size));
    write_text(dir / "summary.json", summary_json(scenario, *surface, rec, report).dump(2) + "\n");
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }

  out << scenario_path.string() << ": " << to_string(rec.halt) << " at t=" << rec.final_time
      << " after " << rec.steps << " steps";
  if (!rec.halt_detail.empty()) out << " (" << rec.halt_detail << ")";
  out << "; outputs in " << dir.string() << "\n";
  if (report.has_failure()) out << "  warning: diagnostics report failure-grade violations\n";
  return is_singular(rec.halt) || rec.halt == HaltReason::graph_breakdown ? kExitSingular : kExitOk;
}

}  // namespace

int cmd_run(const std::string& scenario_path, const std::optional<std::string>& out_dir,
            std::ostream& out, std::ostream& err) {
  const fs::path path(scenario_path);
  std::error_code ec;
  if (!fs::is_directory(path, ec)) {
    return run_one(path, out_dir ? std::optional<fs::path>(*out_dir) : std::nullopt, out, err);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    err << scenario_path << ": no scenario files\n";
    return kExitConfig;
  }
  std::vector<int> codes(files.size(), kExitOk);
  std::vector<std::string> outs(files.size()), errs(files.size());
  parallel_for(files.size(), worker_count(), [&](std::size_t i) {
    std::ostringstream o, e;
    std::optional<fs::path> dir;
    if (out_dir) dir = fs::path(*out_dir) / files[i].stem();
    codes[i] = run_one(files[i], dir, o, e);
    outs[i] = o.str();
    errs[i] = e.str();
  });
  for (std::size_t i = 0; i < files.size(); ++i) {
    out << outs[i];
    err << errs[i];
  }
  return *std::max_element(codes.begin(), codes.end());
}

int cmd_spectrum(const std::string& scenario_path, const std::optional<std::string>& out_dir,
                 const std::vector<int>& modes, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  std::optional<SurfaceProfile> surface;
  try {
    scenario = load_scenario(scenario_path);
    surface = build_surface(scenario.surface);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
  std::vector<int> list = modes.empty() ? scenario.spectrum.modes : modes;
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());
  for (int m : list) {
    if (m < 1) {
      err << "modes must be >= 1\n";
      return kExitConfig;
    }
  }
  const fs::path dir = out_dir.value_or(scenario.output.directory);

  std::vector<std::optional<SpectrumEntry>> entries(list.size());
  std::vector<std::string> failures(list.size());
  std::vector<bool> config_error(list.size(), false);
  parallel_for(list.size(), worker_count(), [&](std::size_t i) {
    FlowConfig cfg = scenario.flow;
    const double predicted = predicted_rate(*surface, scenario.spectrum.radius, list[i]);
    cfg.t_end = scenario.spectrum.t_end.value_or(suggested_duration(predicted));
    try {
      entries[i] = mode_experiment(
          *surface,
          ModeExperiment{scenario.spectrum.radius, list[i], scenario.spectrum.amplitude,
                         scenario.spectrum.samples},
          cfg);
    } catch (const InconclusiveError& e) {
      failures[i] = e.what();
    } catch (const std::exception& e) {
      failures[i] = e.what();
      config_error[i] = true;
    }
  });

  SpectrumReport report;
  report.surface_id = surface->id();
  report.radius = scenario.spectrum.radius;
  int code = kExitOk;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (entries[i]) {
      report.entries.push_back(*entries[i]);
    } else {
      err << "mode " << list[i] << ": " << failures[i] << "\n";
      code = std::max(code, config_error[i] ? int(kExitConfig) : int(kExitSingular));
    }
  }

  PolylineSeries predicted{"predicted", {}, {}, true};
  PolylineSeries fitted{"fitted", {}, {}, true};
  out << "mode  predicted  fitted  relative_error\n";
  for (const auto& e : report.entries) {
    out << e.mode << "  " << format_double(e.predicted) << "  " << format_double(e.fitted) << "  "
        << format_double(e.relative_error) << (e.whole_run_fit ? "  (whole-run fit)" : "") << "\n";
    predicted.x.push_back(e.mode);
    predicted.y.push_back(e.predicted);
    fitted.x.push_back(e.mode);
    fitted.y.push_back(e.fitted);
  }
  try {
    write_text(dir / "spectrum.json", report.to_json());
    if (scenario.output.svg)
      write_text(dir / "spectrum.svg",
                 line_plot_svg("decay rate per mode on " + surface->id(), "mode", "rate",
                               {predicted, fitted}, scenario.output.svg_size));
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
  return code;
}

int cmd_verify(const std::string& run_dir, bool strict, std::ostream& out, std::ostream& err) {
  const fs::path dir(run_dir);
  RunRecord rec;
  std::optional<SurfaceProfile> surface;
  try {
    const Scenario scenario = parse_scenario(read_text(dir / "scenario.json"));
    const json summary = json::parse(read_text(dir / "summary.json"));
    surface = build_surface(scenario.surface);
    rec.records = parse_timeseries_csv(read_text(dir / "timeseries.csv"));
    if (rec.records.empty()) throw ParameterError("timeseries has no rows");
    rec.alpha = scenario.flow.alpha;
    rec.a = surface->a();
    rec.b = surface->b();
    rec.convex_start = summary.at("convex_start").get<bool>();
    std::map<long, double> accuracy;
    for (const auto& r : summary.at("radii")) accuracy[r.at("step").get<long>()] = r.at("accuracy").get<double>();
    for (auto& d : rec.records) {
      if (auto it = accuracy.find(d.step); it != accuracy.end()) d.radii_accuracy = it->second;
    }
  } catch (const std::exception& e) {
    err << run_dir << ": " << e.what() << "\n";
    return kExitConfig;
  }
  const Report report = run_checks(*surface, rec);
  out << report.to_json();
  return report.has_failure(strict) ? kExitVerify : kExitOk;
}

int cmd_surface_info(const std::string& scenario_path, const std::optional<std::string>& out_dir,
                     std::ostream& out, std::ostream& err) {
  Scenario scenario;
  std::optional<SurfaceProfile> surface;
  try {
    scenario = load_scenario(scenario_path);
    surface = build_surface(scenario.surface);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
  const SurfaceProfile& s = *surface;
  out << "surface " << s.id() << "\n";
  out << "a=" << format_double(s.a()) << " b=" << format_double(s.b())
      << " r_max=" << format_double(s.r_max()) << " grid_step=" << format_double(s.grid_step())
      << (s.is_closed_form() ? " (closed form)" : " (tabulated)") << "\n";
  out << "construction invariants: verified\n";
  out << "r,phi,dphi,K,psi,circle_curvature\n";
  const double top = std::min(s.r_max(), 6.0 / s.a());
  for (int k = 1; k <= 24; ++k) {
    const double r = top * k / 24.0;
    out << format_double(r) << "," << format_double(s.phi(r)) << "," << format_double(s.dphi(r))
        << "," << format_double(s.gauss_curvature(r)) << "," << format_double(s.psi(r)) << ","
        << format_double(geodesic_circle_curvature(s, r)) << "\n";
  }

  InequalityTracker bounds("circle_curvature_bounds");
  PolylineSeries gauss{"K(r)", {}, {}, false};
  PolylineSeries psi{"psi(r)", {}, {}, false};
  const int n = 1000;
  for (int k = 1; k <= n; ++k) {
    const double r = s.r_max() * k / n;
    const double kc = geodesic_circle_curvature(s, r);
    const double scale = 1e-9 * std::max(1.0, kc);
    bounds.observe(s.a() / std::tanh(s.a() * r), kc, scale, r);
    bounds.observe(kc, s.b() / std::tanh(s.b() * r), scale, r);
    gauss.x.push_back(r);
    gauss.y.push_back(s.gauss_curvature(r));
    psi.x.push_back(r);
    psi.y.push_back(s.psi(r));
  }
  const CheckResult b = bounds.result();
  out << "a coth(a r) <= phi'/phi <= b coth(b r): " << to_string(b.status)
      << " (worst excess " << format_double(b.worst_excess) << ")\n";

  if (scenario.output.svg) {
    const fs::path dir = out_dir.value_or(scenario.output.directory);
    try {
      write_text(dir / "surface.svg", line_plot_svg("curvature and psi of " + s.id(), "r",
                                                    "value", {gauss, psi}, scenario.output.svg_size));
    } catch (const std::exception& e) {
      err << e.what() << "\n";
      return kExitConfig;
    }
  }
  return b.status == CheckStatus::failure ? kExitVerify : kExitOk;
}

}  // namespace pinchflow
