#pragma once

// Static semilog-y SVG convergence plots from trace files.

#include <string>
#include <vector>

#include "tfp/io.hpp"

namespace tfp::plot {

enum class Series { gap, residual, bound };

Series series_from_string(const std::string& s);  // throws InvalidArgument
std::string to_string(Series s);

struct LabeledTrace {
  std::string label;
  std::vector<io::TraceRow> rows;
};

// Values are clamped to this floor before taking log10.
inline constexpr double kLogFloor = 1e-16;

// 800x600 viewBox, one polyline per (trace, series), decade ticks.
// Output depends only on the inputs (no timestamps, fixed number formatting).
std::string render_svg(const std::vector<LabeledTrace>& traces, const std::vector<Series>& series);

}  // namespace tfp::plot
