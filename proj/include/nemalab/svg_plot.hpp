#pragma once

#include <string>
#include <vector>

namespace nemalab {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  /// Draw markers instead of a polyline.
  bool markers = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 640;
  int height = 400;
};

/// Standalone SVG line chart. Non-finite points (and nonpositive ones on a
/// log axis) are skipped.
std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace nemalab
