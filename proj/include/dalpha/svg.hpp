#pragma once

#include <string>
#include <vector>

namespace dalpha {

struct ChartSeries {
  std::string name;
  /// x may contain +infinity, drawn one tick past the largest finite value and labelled "inf".
  std::vector<double> x;
  std::vector<double> y;
  /// Half-height of the error bar at each point; empty for none.
  std::vector<double> err;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "alpha";
  std::string y_label = "cost ratio";
  int width = 720;
  int height = 480;
};

/// Standalone SVG document: axes with ticks, one polyline per series, error bars, legend.
std::string render_line_chart(const std::vector<ChartSeries>& series, const ChartOptions& options);

/// Escapes the five XML special characters.
std::string xml_escape(const std::string& text);

}  // namespace dalpha
