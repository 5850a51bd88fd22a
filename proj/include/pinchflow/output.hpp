#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pinchflow/curve.hpp"
#include "pinchflow/record.hpp"

namespace pinchflow {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
std::string format_optional(const std::optional<double>& x);

/// Header of the time-series CSV, in column order.
const std::vector<std::string>& timeseries_columns();

std::string timeseries_csv(const std::vector<DiagnosticsRecord>& records);
/// Inverse of timeseries_csv for the columns it writes. Throws ParameterError on
/// malformed input.
std::vector<DiagnosticsRecord> parse_timeseries_csv(const std::string& text);

/// Columns j,u,r,kappa,ds with u reduced to [0, 2 pi).
std::string snapshot_csv(const DiscreteCurve& curve);

struct PolylineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

/// Line plot with labelled axes and a legend.
std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PolylineSeries>& series,
                          int size);

/// Snapshots drawn in the chart plane (x, y) = (r cos u, r sin u), pole marked.
std::string chart_curves_svg(const std::vector<Snapshot>& snapshots, int size);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace pinchflow
