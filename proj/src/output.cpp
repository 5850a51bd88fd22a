#include "pinchflow/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pinchflow/errors.hpp"

namespace pinchflow {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string format_optional(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string();
}

const std::vector<std::string>& timeseries_columns() {
  static const std::vector<std::string> columns{
      "step",  "t",     "L",         "A",        "Delta",      "h",
      "kappa_min", "kappa_max", "sup_kappa_minus_h", "gb_residual", "r_min", "r_max",
      "rho_minus", "rho_plus", "u_supp_min", "dt_used"};
  return columns;
}

std::string timeseries_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out;
  const auto& cols = timeseries_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& d : records) {
    out += std::to_string(d.step);
    for (double x : {d.t, d.length, d.area, d.deficit, d.h, d.kappa_min, d.kappa_max,
                     d.sup_kappa_minus_h, d.gb_residual, d.r_min, d.r_max})
      out += "," + format_double(x);
    out += "," + format_optional(d.rho_minus);
    out += "," + format_optional(d.rho_plus);
    out += "," + format_optional(d.support_min);
    out += "," + format_double(d.dt_used);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t line) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw ParameterError("timeseries line " + std::to_string(line) + ": '" + cell +
                         "' is not a number");
  return x;
}

std::optional<double> parse_optional(const std::string& cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  return parse_number(cell, line);
}

}  // namespace

std::vector<DiagnosticsRecord> parse_timeseries_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("timeseries is empty");
  const auto header = split(line);
  if (header != timeseries_columns()) throw ParameterError("timeseries header does not match");
  std::vector<DiagnosticsRecord> out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != header.size())
      throw ParameterError("timeseries line " + std::to_string(number) + " has " +
                           std::to_string(c.size()) + " cells");
    DiagnosticsRecord d;
    d.step = static_cast<long>(parse_number(c[0], number));
    d.t = parse_number(c[1], number);
    d.length = parse_number(c[2], number);
    d.area = parse_number(c[3], number);
    d.deficit = parse_number(c[4], number);
    d.h = parse_number(c[5], number);
    d.kappa_min = parse_number(c[6], number);
    d.kappa_max = parse_number(c[7], number);
    d.sup_kappa_minus_h = parse_number(c[8], number);
    d.gb_residual = parse_number(c[9], number);
    d.r_min = parse_number(c[10], number);
    d.r_max = parse_number(c[11], number);
    d.rho_minus = parse_optional(c[12], number);
    d.rho_plus = parse_optional(c[13], number);
    d.support_min = parse_optional(c[14], number);
    d.dt_used = parse_number(c[15], number);
    out.push_back(d);
  }
  return out;
}

std::string snapshot_csv(const DiscreteCurve& curve) {
  std::string out = "j,u,r,kappa,ds\n";
  const auto kappa = curve.curvature();
  const auto ds = curve.ds();
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const ChartPoint p = curve.point(j);
    out += std::to_string(j) + "," + format_double(p.u) + "," + format_double(p.r) + "," +
           format_double(kappa[j]) + "," + format_double(ds[j]) + "\n";
  }
  return out;
}

namespace {

const std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                          "#9467bd", "#ff7f0e", "#17becf"};

// Fixed-precision label text; the data values themselves go out at full precision.
std::string label(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string svg_open(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PolylineSeries>& series,
                          int size) {
  const int width = size * 4 / 3;
  const int height = size;
  const double left = 70, right = 20, top = 30, bottom = 45;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string out = svg_open(width, height);
  out += "<text x=\"" + format_double(width / 2.0) + "\" y=\"18\" text-anchor=\"middle\">" +
         escape_xml(title) + "</text>\n";
  out += "<rect x=\"" + format_double(left) + "\" y=\"" + format_double(top) + "\" width=\"" +
         format_double(pw) + "\" height=\"" + format_double(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    out += "<text x=\"" + format_double(px(fx)) + "\" y=\"" + format_double(height - bottom + 15) +
           "\" text-anchor=\"middle\">" + label(fx) + "</text>\n";
    out += "<text x=\"" + format_double(left - 5) + "\" y=\"" + format_double(py(fy) + 4) +
           "\" text-anchor=\"end\">" + label(fy) + "</text>\n";
  }
  out += "<text x=\"" + format_double(left + pw / 2) + "\" y=\"" + format_double(height - 8.0) +
         "\" text-anchor=\"middle\">" + escape_xml(x_label) + "</text>\n";
  out += "<text x=\"14\" y=\"" + format_double(top + ph / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " + format_double(top + ph / 2) +
         ")\">" + escape_xml(y_label) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* colour = kPalette[i % kPalette.size()];
    std::string points;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      points += format_double(px(s.x[k])) + "," + format_double(py(s.y[k])) + " ";
      if (s.markers)
        out += "<circle cx=\"" + format_double(px(s.x[k])) + "\" cy=\"" +
               format_double(py(s.y[k])) + "\" r=\"3\" fill=\"" + colour + "\"/>\n";
    }
    if (!s.markers)
      out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" points=\"" + points +
             "\"/>\n";
    out += "<text x=\"" + format_double(left + 8) + "\" y=\"" +
           format_double(top + 14 + 14.0 * static_cast<double>(i)) + "\" fill=\"" + colour +
           "\">" + escape_xml(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string chart_curves_svg(const std::vector<Snapshot>& snapshots, int size) {
  double extent = 0.0;
  for (const auto& s : snapshots) {
    for (double r : s.curve.r()) extent = std::max(extent, r);
  }
  if (extent == 0.0) extent = 1.0;
  extent *= 1.1;
  const double margin = 30.0;
  const double scale = (size - 2.0 * margin) / (2.0 * extent);
  const double cx = size / 2.0;
  const double cy = size / 2.0 - 8.0;
  std::string out = svg_open(size, size);
  out += "<line x1=\"" + format_double(cx - extent * scale) + "\" y1=\"" + format_double(cy) +
         "\" x2=\"" + format_double(cx + extent * scale) + "\" y2=\"" + format_double(cy) +
         "\" stroke=\"#bbb\"/>\n";
  out += "<line x1=\"" + format_double(cx) + "\" y1=\"" + format_double(cy - extent * scale) +
         "\" x2=\"" + format_double(cx) + "\" y2=\"" + format_double(cy + extent * scale) +
         "\" stroke=\"#bbb\"/>\n";
  out += "<circle cx=\"" + format_double(cx) + "\" cy=\"" + format_double(cy) +
         "\" r=\"2.5\" fill=\"black\"/>\n";
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto& c = snapshots[i].curve;
    std::string points;
    for (std::size_t j = 0; j <= c.size(); ++j) {
      const ChartPoint p = c.point(j % c.size());
      const ChartXY q = to_xy(p);
      points += format_double(cx + q.x * scale) + "," + format_double(cy - q.y * scale) + " ";
    }
    const char* colour = kPalette[i % kPalette.size()];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" points=\"" + points +
           "\"/>\n";
    out += "<text x=\"6\" y=\"" + format_double(14.0 + 13.0 * static_cast<double>(i)) +
           "\" fill=\"" + colour + "\">t=" + label(snapshots[i].t) + "</text>\n";
  }
  out += "<text x=\"" + format_double(size / 2.0) + "\" y=\"" + format_double(size - 8.0) +
         "\" text-anchor=\"middle\">chart rendering, not isometric</text>\n";
  out += "</svg>\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ParameterError("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace pinchflow
