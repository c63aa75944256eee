#include "tla/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tla/csv.hpp"
#include "tla/tensor.hpp"

namespace tla {

namespace {

constexpr double kWidth = 760.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Round axis limits outward to a tidy step.
void nice_limits(double& lo, double& hi) {
  if (hi <= lo) hi = lo + 1.0;
  const double span = hi - lo;
  const double step = std::pow(10.0, std::floor(std::log10(span)));
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const SvgSeries& s : series) {
    check(s.x.size() == s.mean.size(), "render_line_chart: x/mean length mismatch");
    check(s.stddev.empty() || s.stddev.size() == s.mean.size(),
          "render_line_chart: stddev length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      const double sd = s.stddev.empty() ? 0.0 : s.stddev[i];
      y_min = std::min(y_min, s.mean[i] - sd);
      y_max = std::max(y_max, s.mean[i] + sd);
    }
  }
  if (!std::isfinite(x_min)) { x_min = 0.0; x_max = 1.0; y_min = 0.0; y_max = 1.0; }
  nice_limits(y_min, y_max);
  if (x_max <= x_min) x_max = x_min + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // Axes and gridlines (5 ticks each).
  for (int k = 0; k <= 5; ++k) {
    const double fx = x_min + (x_max - x_min) * k / 5.0;
    const double fy = y_min + (y_max - y_min) * k / 5.0;
    svg << "<line x1=\"" << num(sx(fx)) << "\" y1=\"" << num(kTop) << "\" x2=\""
        << num(sx(fx)) << "\" y2=\"" << num(kTop + ph)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(sy(fy)) << "\" x2=\""
        << num(kLeft + pw) << "\" y2=\"" << num(sy(fy))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(fx) << "</text>\n";
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(sy(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(fy) << "</text>\n";
  }
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label
      << "</text>\n";

  for (const SvgSeries& s : series) {
    if (!s.stddev.empty() && s.x.size() > 1) {
      std::ostringstream pts;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        pts << num(sx(s.x[i])) << "," << num(sy(s.mean[i] + s.stddev[i])) << " ";
      for (std::size_t i = s.x.size(); i-- > 0;)
        pts << num(sx(s.x[i])) << "," << num(sy(s.mean[i] - s.stddev[i])) << " ";
      svg << "<polygon points=\"" << pts.str() << "\" fill=\"" << s.color
          << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      pts << num(sx(s.x[i])) << "," << num(sy(s.mean[i])) << " ";
    svg << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.8\"/>\n";
  }

  // Legend, top-right corner of the plot area.
  double ly = kTop + 14.0;
  for (const SvgSeries& s : series) {
    svg << "<line x1=\"" << num(kLeft + pw - 150) << "\" y1=\"" << num(ly - 4)
        << "\" x2=\"" << num(kLeft + pw - 125) << "\" y2=\"" << num(ly - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(kLeft + pw - 118) << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    ly += 16.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
  std::ofstream f(path, std::ios::binary);
  check(static_cast<bool>(f), "write_line_chart: cannot open " + path);
  const std::string s = render_line_chart(title, x_label, y_label, series);
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  check(static_cast<bool>(f), "write_line_chart: write failed for " + path);
}

}  // namespace tla
