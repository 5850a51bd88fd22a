#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pinchflow/chart.hpp"
#include "pinchflow/curve.hpp"

namespace pinchflow {

/// One time slice of every monitored functional.
struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double length = 0.0;
  double area = 0.0;
  double deficit = 0.0;  // L^2 - 4 pi A - a^2 A^2
  double h = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double sup_kappa_minus_h = 0.0;
  double gb_residual = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double dt_used = 0.0;

  std::optional<double> rho_minus;
  std::optional<double> rho_plus;
  std::optional<SurfacePoint> rho_minus_center;
  std::optional<SurfacePoint> rho_plus_center;
  std::optional<double> radii_accuracy;
  std::optional<double> support_min;
  std::optional<double> support_max;

  // Runtime convexity assertion kappa_min(t) >= min(kappa_min(0), a) - 1e-6,
  // only evaluated for convex initial data.
  std::optional<bool> convexity_ok;
};

enum class HaltReason { completed, converged, blow_up, escape, embeddedness_loss, graph_breakdown };

std::string to_string(HaltReason reason);
HaltReason halt_reason_from_string(const std::string& name);
/// blow-up, escape and embeddedness loss.
bool is_singular(HaltReason reason);

struct Snapshot {
  long step = 0;
  double t = 0.0;
  DiscreteCurve curve;
};

struct RunRecord {
  std::string surface_id;
  double alpha = 0.0;
  double a = 1.0;
  double b = 1.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  HaltReason halt = HaltReason::completed;
  std::string halt_detail;
  long steps = 0;
  double final_time = 0.0;
  bool convex_start = false;
};

}  // namespace pinchflow
