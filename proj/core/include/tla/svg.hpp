#pragma once

#include <string>
#include <vector>

namespace tla {

/// One named series of (x, mean, optional stddev) points.
struct SvgSeries {
  std::string label;
  std::string color;                 // e.g. "#1f77b4"
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> stddev;        // empty = no band
};

/// Hand-written SVG line chart with an optional +-1 std shaded band per
/// series. Plots are a pure function of the numbers passed in; the CSV they
/// came from stays the authoritative artifact.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series);

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

}  // namespace tla
