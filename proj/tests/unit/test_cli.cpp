#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pinchflow/commands.hpp"
#include "pinchflow/errors.hpp"
#include "pinchflow/output.hpp"
#include "pinchflow/scenario.hpp"

using namespace pinchflow;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("pinchflow_test_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& text) const {
    write_text(path / name, text);
    return (path / name).string();
  }
};

const char* kCircleScenario = R"({
  "spec_version": 1,
  "surface": {"family": "constant_curvature", "a": 1},
  "initial_curve": {"kind": "circle", "radius": 1, "samples": 64},
  "flow": {"alpha": 0, "scheme": "explicit_rk4", "dt_policy": {"kind": "fixed", "dt": 1e-3},
           "t_end": 0.05, "stop_on_convergence": false},
  "diagnostics": {"stride": 5, "radii": false},
  "output": {"svg": false}
})";

const char* kEllipseScenario = R"({
  "spec_version": 1,
  "surface": {"family": "tanh_pinch", "a": 1, "b": 2, "c": 1},
  "initial_curve": {"kind": "chart_ellipse", "semi_x": 1.0, "semi_y": 0.8, "samples": 48},
  "flow": {"alpha": 0, "scheme": "explicit_rk4", "dt_policy": {"kind": "fixed", "dt": 1e-3}, "t_end": 0.1},
  "diagnostics": {"stride": 10, "radii": true, "radii_grid": 8, "radii_budget": 60},
  "output": {"snapshot_stride": 0}
})";

int run_cli(int (*fn)(const std::string&, const std::optional<std::string>&, std::ostream&, std::ostream&),
            const std::string& scenario, const std::string& out_dir, std::string* stdout_text = nullptr) {
  std::ostringstream out, err;
  const int code = fn(scenario, out_dir, out, err);
  if (stdout_text) *stdout_text = out.str();
  return code;
}

}  // namespace

TEST_CASE("scenario parsing fills defaults and rejects bad documents") {
  const Scenario s = parse_scenario(kCircleScenario);
  CHECK(s.spec_version == kScenarioVersion);
  CHECK(s.samples == 64);
  CHECK(std::holds_alternative<CircleCurve>(s.curve));
  CHECK(std::get<FixedStep>(s.flow.step).dt == 1e-3);
  CHECK(s.flow.t_end == 0.05);
  CHECK_FALSE(s.diagnostics.radii);

  // Canonical JSON parses back to the same canonical JSON.
  CHECK(to_json(parse_scenario(to_json(s))) == to_json(s));

  auto doc = nlohmann::json::parse(kCircleScenario);
  doc["flow"]["alhpa"] = 1;
  CHECK_THROWS_AS(parse_scenario(doc.dump()), ParameterError);
  try {
    parse_scenario(doc.dump());
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("alhpa") != std::string::npos);
  }

  doc = nlohmann::json::parse(kCircleScenario);
  doc.erase("spec_version");
  CHECK_THROWS_AS(parse_scenario(doc.dump()), ParameterError);
  doc["spec_version"] = 99;
  CHECK_THROWS_AS(parse_scenario(doc.dump()), ParameterError);

  doc = nlohmann::json::parse(kCircleScenario);
  doc["flow"]["t_end"] = "long";
  CHECK_THROWS_AS(parse_scenario(doc.dump()), ParameterError);

  doc = nlohmann::json::parse(kCircleScenario);
  doc["flow"]["dt_policy"] = {{"kind", "cfl"}, {"safety", 2.0}};
  CHECK_THROWS_AS(parse_scenario(doc.dump()), ParameterError);

  CHECK_THROWS_AS(parse_scenario("{ not json"), ParameterError);
}

TEST_CASE("timeseries CSV round-trips every column") {
  DiagnosticsRecord d;
  d.step = 42;
  d.t = 0.1 + 0.2;
  d.length = 7.384017;
  d.area = 3.412305;
  d.deficit = -1.2e-13;
  d.h = 1.0 / 3.0;
  d.kappa_min = 1.31;
  d.kappa_max = 1.32;
  d.sup_kappa_minus_h = 1e-9;
  d.gb_residual = 2.5e-11;
  d.r_min = 0.99;
  d.r_max = 1.01;
  d.rho_minus = 0.995;
  d.support_min = std::sinh(1.0);
  d.dt_used = 1e-4;
  DiagnosticsRecord e = d;
  e.step = 43;
  e.rho_minus.reset();
  e.support_min.reset();

  const std::string text = timeseries_csv({d, e});
  CHECK(text.rfind("step,t,L,A,Delta,h,kappa_min,kappa_max,sup_kappa_minus_h,gb_residual,r_min,r_max,"
                   "rho_minus,rho_plus,u_supp_min,dt_used\n",
                   0) == 0);
  const auto back = parse_timeseries_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].t == d.t);
  CHECK(back[0].h == d.h);
  CHECK(back[0].deficit == d.deficit);
  CHECK(back[0].rho_minus == d.rho_minus);
  CHECK_FALSE(back[0].rho_plus);
  CHECK(back[0].support_min == d.support_min);
  CHECK_FALSE(back[1].rho_minus);
  CHECK(back[1].step == 43);
  CHECK(timeseries_csv(back) == text);

  CHECK_THROWS_AS(parse_timeseries_csv("step,t\n1,2\n"), ParameterError);
  std::string broken = text;
  broken.replace(broken.find("0.30000000000000004"), 3, "abc");
  CHECK_THROWS_AS(parse_timeseries_csv(broken), ParameterError);
}

TEST_CASE("round-trip number formatting") {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0})
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_optional(std::nullopt).empty());
}

TEST_CASE("run on a circle writes constant rows and verifies") {
  const TempDir dir("circle");
  const std::string scenario = dir.file("circle.json", kCircleScenario);
  const std::string out = (dir.path / "out").string();
  std::string text;
  CHECK(run_cli(cmd_run, scenario, out, &text) == kExitOk);
  CHECK(text.find("completed") != std::string::npos);
  for (const char* f : {"scenario.json", "summary.json", "timeseries.csv"}) CHECK(fs::exists(fs::path(out) / f));
  CHECK_FALSE(fs::exists(fs::path(out) / "curves.svg"));

  const auto rows = parse_timeseries_csv(read_text(fs::path(out) / "timeseries.csv"));
  REQUIRE(rows.size() >= 2);
  for (const auto& r : rows) {
    CHECK(r.length == doctest::Approx(rows.front().length).epsilon(1e-12));
    CHECK(r.area == doctest::Approx(rows.front().area).epsilon(1e-12));
    CHECK(r.kappa_min == doctest::Approx(rows.front().kappa_min).epsilon(1e-12));
  }

  const auto summary = nlohmann::json::parse(read_text(fs::path(out) / "summary.json"));
  CHECK(summary["halt_reason"] == "completed");
  CHECK(summary["spec_version"] == kScenarioVersion);

  std::ostringstream o, e;
  CHECK(cmd_verify(out, false, o, e) == kExitOk);
  CHECK(cmd_verify(out, true, o, e) == kExitOk);
}

TEST_CASE("identical scenarios produce byte-identical outputs") {
  const TempDir dir("determinism");
  const std::string scenario = dir.file("ellipse.json", kEllipseScenario);
  const fs::path a = dir.path / "a", b = dir.path / "b";
  CHECK(run_cli(cmd_run, scenario, a.string()) == kExitOk);
  CHECK(run_cli(cmd_run, scenario, b.string()) == kExitOk);
  for (const char* f : {"summary.json", "timeseries.csv", "curves.svg", "scenario.json"})
    CHECK(read_text(a / f) == read_text(b / f));
  for (const auto& entry : fs::directory_iterator(a / "snapshots"))
    CHECK(read_text(entry.path()) == read_text(b / "snapshots" / entry.path().filename()));

  const std::string svg = read_text(a / "curves.svg");
  CHECK(svg.find("chart rendering, not isometric") != std::string::npos);
  const std::string snap = read_text(a / "snapshots" / "snapshot_00000000.csv");
  CHECK(snap.rfind("j,u,r,kappa,ds\n", 0) == 0);
}

TEST_CASE("verify detects a tampered deficit") {
  const TempDir dir("tamper");
  const std::string scenario = dir.file("ellipse.json", kEllipseScenario);
  const fs::path out = dir.path / "out";
  REQUIRE(run_cli(cmd_run, scenario, out.string()) == kExitOk);
  std::ostringstream o, e;
  REQUIRE(cmd_verify(out.string(), false, o, e) == kExitOk);

  auto rows = parse_timeseries_csv(read_text(out / "timeseries.csv"));
  REQUIRE(rows.size() > 3);
  rows[rows.size() / 2].deficit += 1.0;
  write_text(out / "timeseries.csv", timeseries_csv(rows));
  std::ostringstream o2, e2;
  CHECK(cmd_verify(out.string(), false, o2, e2) == kExitVerify);
  CHECK(o2.str().find("deficit_nonincreasing") != std::string::npos);
}

TEST_CASE("configuration and I/O errors exit with code 1") {
  const TempDir dir("errors");
  std::ostringstream o, e;
  CHECK(run_cli(cmd_run, dir.file("bad.json", "{ \"spec_version\": 1, "), (dir.path / "o").string()) == kExitConfig);
  CHECK(run_cli(cmd_run, (dir.path / "missing.json").string(), (dir.path / "o").string()) == kExitConfig);
  CHECK(cmd_verify((dir.path / "nothing_here").string(), false, o, e) == kExitConfig);

  auto doc = nlohmann::json::parse(kCircleScenario);
  doc["surface"] = {{"family", "tanh_pinch"}, {"a", 2.0}, {"b", 1.0}, {"c", 1.0}};
  const std::string inverted = dir.file("inverted.json", doc.dump());
  CHECK(run_cli(cmd_surface_info, inverted, (dir.path / "info").string()) == kExitConfig);
  CHECK(run_cli(cmd_run, inverted, (dir.path / "run").string()) == kExitConfig);

  std::ostringstream so, se;
  CHECK(cmd_spectrum(inverted, (dir.path / "spec").string(), {2}, so, se) == kExitConfig);
  CHECK(cmd_spectrum(dir.file("ok.json", kCircleScenario), (dir.path / "spec").string(), {0}, so, se) ==
        kExitConfig);
}

TEST_CASE("an unstable explicit run exits with code 2") {
  const TempDir dir("blowup");
  auto doc = nlohmann::json::parse(kCircleScenario);
  doc["initial_curve"] = {{"kind", "perturbed_circle"}, {"radius", 1}, {"mode", 3}, {"amplitude", 0.1}, {"samples", 128}};
  doc["flow"]["dt_policy"] = {{"kind", "fixed"}, {"dt", 0.05}};
  doc["flow"]["t_end"] = 1.0;
  const fs::path out = dir.path / "out";
  CHECK(run_cli(cmd_run, dir.file("blow.json", doc.dump()), out.string()) == kExitSingular);
  const auto summary = nlohmann::json::parse(read_text(out / "summary.json"));
  CHECK(summary["halt_reason"] == "blow-up");
}

TEST_CASE("surface-info on the model plane has psi identically one") {
  const TempDir dir("info");
  auto doc = nlohmann::json::parse(kCircleScenario);
  doc["output"]["svg"] = true;
  std::string text;
  CHECK(run_cli(cmd_surface_info, dir.file("s.json", doc.dump()), (dir.path / "info").string(), &text) ==
        kExitOk);
  CHECK(fs::exists(dir.path / "info" / "surface.svg"));
  // Table rows: r,phi,dphi,K,psi,circle_curvature.
  std::istringstream lines(text);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream cols(line);
    double r, phi, dphi, k, psi, circle;
    if (!(cols >> r >> phi >> dphi >> k >> psi >> circle)) continue;
    ++rows;
    CHECK(psi == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(k == doctest::Approx(-1.0).epsilon(1e-8));
  }
  CHECK(rows == 24);
}

TEST_CASE("surface-info on a pinched profile has a decreasing psi column") {
  const TempDir dir("info_tanh");
  auto doc = nlohmann::json::parse(kCircleScenario);
  doc["surface"] = {{"family", "tanh_pinch"}, {"a", 1.0}, {"b", 2.0}, {"c", 1.0}};
  std::string text;
  CHECK(run_cli(cmd_surface_info, dir.file("s.json", doc.dump()), (dir.path / "info").string(), &text) == kExitOk);
  std::istringstream lines(text);
  std::string line;
  double last = 2.0;
  int rows = 0;
  while (std::getline(lines, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream cols(line);
    double r, phi, dphi, k, psi, circle;
    if (!(cols >> r >> phi >> dphi >> k >> psi >> circle)) continue;
    // K saturates at -b^2 so fast that psi is flat to double precision beyond r ~ 4.
    if (r <= 3.0) CHECK(psi < last);
    CHECK(psi <= last);
    last = psi;
    ++rows;
  }
  CHECK(rows == 24);
}

TEST_CASE("batch runs write one directory per scenario") {
  const TempDir dir("batch");
  const fs::path in = dir.path / "in";
  fs::create_directories(in);
  write_text(in / "first.json", kCircleScenario);
  auto doc = nlohmann::json::parse(kCircleScenario);
  doc["initial_curve"]["radius"] = 1.5;
  write_text(in / "second.json", doc.dump());
  setenv("HF_THREADS", "2", 1);
  CHECK(worker_count() == 2);
  const fs::path out = dir.path / "out";
  CHECK(run_cli(cmd_run, in.string(), out.string()) == kExitOk);
  CHECK(fs::exists(out / "first" / "summary.json"));
  CHECK(fs::exists(out / "second" / "summary.json"));
  setenv("HF_THREADS", "0", 1);
  CHECK(worker_count() >= 1);
  unsetenv("HF_THREADS");
}

TEST_CASE("spectrum command writes a report") {
  const TempDir dir("spectrum");
  auto doc = nlohmann::json::parse(kCircleScenario);
  doc["flow"] = {{"alpha", 0}, {"scheme", "semi_implicit_graph"}, {"dt_policy", {{"kind", "fixed"}, {"dt", 1e-3}}}};
  doc["output"]["svg"] = true;
  doc["spectrum"] = {{"radius", 1.0}, {"modes", {2}}, {"amplitude", 1e-3}, {"samples", 128}, {"t_end", 5.0}};
  std::ostringstream o, e;
  const fs::path out = dir.path / "out";
  CHECK(cmd_spectrum(dir.file("s.json", doc.dump()), out.string(), {}, o, e) == kExitOk);
  const auto report = nlohmann::json::parse(read_text(out / "spectrum.json"));
  REQUIRE(report["entries"].size() == 1);
  CHECK(report["entries"][0]["mode"] == 2);
  CHECK(report["entries"][0]["relative_error"].get<double>() < 0.05);
  CHECK(fs::exists(out / "spectrum.svg"));
}
