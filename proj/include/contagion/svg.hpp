#pragma once

#include <span>
#include <string>
#include <vector>

#include "contagion/stats.hpp"

namespace contagion {

struct PlotLabels {
  std::string title;
  std::string x;
  std::string y;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the line
};

enum class LineStyle { Lines, Points, LinesAndPoints };

// Self-contained SVG documents; identical input gives identical bytes.
std::string svg_line_plot(const PlotLabels& labels, std::span<const Series> series,
                          LineStyle style = LineStyle::LinesAndPoints);
std::string svg_histogram(const PlotLabels& labels, const Histogram& h);

}  // namespace contagion
