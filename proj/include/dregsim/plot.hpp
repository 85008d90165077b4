#pragma once

#include <string>
#include <vector>

namespace dregsim {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LinePlot {
  std::string file_stem;  // output is <file_stem>.svg
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

// Self-contained SVG: axes, ticks, one polyline per series and a legend.
// Points that cannot be drawn (non-finite, or <= 0 on a log axis) break the
// polyline instead of being connected across.
std::string render_svg(const LinePlot& plot);

}  // namespace dregsim
