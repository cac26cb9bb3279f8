#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sketchbound {

struct PlotSeries {
  enum class Style { Line, Markers };
  std::string label;
  std::string color;
  Style style = Style::Line;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
};

/// Standalone SVG document with axes, ticks and a legend. Points with
/// non-finite coordinates (or x <= 0 on a log axis) are skipped.
std::string render_plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

/// Bars over [lo[i], hi[i]) with heights counts[i].
std::string render_histogram_svg(const PlotSpec& spec, const std::vector<double>& lo,
                                 const std::vector<double>& hi, const std::vector<double>& counts);

}  // namespace sketchbound
