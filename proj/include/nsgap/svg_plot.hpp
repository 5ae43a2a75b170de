#pragma once

#include <optional>
#include <string>
#include <vector>

namespace nsgap {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  /// Draw markers instead of a polyline.
  bool markers = false;
};

/// Vertical shaded interval, e.g. one excursion.
struct PlotSpan {
  double x0 = 0.0;
  double x1 = 0.0;
  std::string label;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  /// Horizontal band [lo, hi] shaded across the plot.
  std::optional<std::pair<double, double>> band;
  std::vector<PlotSpan> spans;
  int width = 720;
  int height = 420;
};

/// Self-contained SVG document (no scripts, fonts or external references).
std::string render_svg(const LinePlot& plot);
void write_svg(const LinePlot& plot, const std::string& path);

}  // namespace nsgap
