#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pinchflow/curve.hpp"
#include "pinchflow/flow.hpp"
#include "pinchflow/surface.hpp"

namespace pinchflow {

inline constexpr int kScenarioVersion = 1;

struct SurfaceSpec {
  ProfileFamily family = ProfileFamily::constant_curvature;
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  std::optional<double> r_max;  // default 20/a
  double grid_step = 1e-3;
  // Tabulated family only.
  std::vector<double> table_r, table_phi, table_dphi, table_ddphi;
};

struct DiagnosticsSpec {
  int stride = 10;
  bool radii = true;
  RadiiSearch search{};
};

struct OutputSpec {
  std::string directory = "pinchflow_out";
  int snapshot_stride = 0;
  bool svg = true;
  int svg_size = 480;
};

struct SpectrumSpec {
  double radius = 1.0;
  std::vector<int> modes{1, 2, 3};
  double amplitude = 1e-3;
  std::size_t samples = 256;
  std::optional<double> t_end;  // default: suggested_duration of each mode's prediction
};

struct Scenario {
  int spec_version = kScenarioVersion;
  std::uint64_t seed = 0;
  SurfaceSpec surface;
  InitialCurve curve = CircleCurve{};
  std::size_t samples = 256;
  FlowConfig flow;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  SpectrumSpec spectrum;
};

/// Parses a scenario document. Unknown keys, wrong types and a missing or
/// unsupported spec_version throw ParameterError naming the offending key.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical JSON of a scenario with every default filled in.
std::string to_json(const Scenario& scenario);

SurfaceProfile build_surface(const SurfaceSpec& spec);

/// Initial data in the representation the configured scheme expects.
CurveState build_initial_state(const SurfaceProfile& surface, const Scenario& scenario);

}  // namespace pinchflow
