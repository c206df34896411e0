// Minimal SVG emission for run artifacts: line plots (optionally with a
// logarithmic y axis, matching how relaxation curves are usually read) and a
// categorical mu-g heatmap for phase maps.  Data files remain the contract;
// these are conveniences.
#pragma once

#include "gn/types.hpp"

#include <string>
#include <vector>

namespace gn {

struct PlotSeriesData {
  std::string label;
  std::vector<double> x, y;
};

struct LinePlotOptions {
  std::string title, x_label = "t", y_label;
  bool log_y = false;
  int width = 960, height = 600;
};

std::string svg_line_plot(const std::vector<PlotSeriesData>& series, const LinePlotOptions& opt);

struct HeatmapCell {
  double mu = 0.0, g = 0.0;
  int category = -1; // index into category_names; -1 = missing
};

struct HeatmapOptions {
  std::string title, x_label = "mu", y_label = "g";
  std::vector<std::string> category_names;
  int width = 760, height = 640;
};

std::string svg_phase_heatmap(const std::vector<HeatmapCell>& cells, const HeatmapOptions& opt);

} // namespace gn
