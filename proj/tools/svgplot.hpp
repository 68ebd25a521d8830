#ifndef CRISP_TOOLS_SVGPLOT_HPP
#define CRISP_TOOLS_SVGPLOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "crisp/errors.hpp"

namespace crisp::tools {

// Minimal deterministic SVG line plot: one series, linear axes, an optional
// horizontal reference line. Coordinates are formatted with fixed precision
// so repeated runs produce identical bytes.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<double>& xs, const std::vector<double>& ys,
                           bool with_ref_line = false, double ref_y = 0.0) {
  if (xs.size() != ys.size()) throw ConfigError("svg plot: x/y size mismatch");

  const double width = 640, height = 480;
  const double ml = 60, mr = 20, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (!xs.empty()) {
    x_lo = *std::min_element(xs.begin(), xs.end());
    x_hi = *std::max_element(xs.begin(), xs.end());
    y_lo = *std::min_element(ys.begin(), ys.end());
    y_hi = *std::max_element(ys.begin(), ys.end());
  }
  if (with_ref_line) {
    y_lo = std::min(y_lo, ref_y);
    y_hi = std::max(y_hi, ref_y);
  }
  if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1.0;
  if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1.0;

  const auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
  const auto sy = [&](double y) { return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph; };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write plot: " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "viewBox=\"0 0 640 480\">\n";
  f << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  f << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" << title << "</text>\n";
  // Axes.
  f << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(ml + pw)
    << "\" y2=\"" << num(mt + ph) << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(ml)
    << "\" y2=\"" << num(mt + ph) << "\" stroke=\"black\"/>\n";
  // End-of-range tick labels.
  f << "<text x=\"" << num(ml) << "\" y=\"" << num(mt + ph + 18)
    << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(x_lo) << "</text>\n";
  f << "<text x=\"" << num(ml + pw) << "\" y=\"" << num(mt + ph + 18)
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(x_hi)
    << "</text>\n";
  f << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(mt + ph)
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(y_lo)
    << "</text>\n";
  f << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(mt + 4)
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(y_hi)
    << "</text>\n";
  f << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 12)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
    << "</text>\n";
  f << "<text x=\"16\" y=\"" << num(mt + ph / 2)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 16 " << num(mt + ph / 2) << ")\">" << y_label << "</text>\n";

  if (with_ref_line) {
    f << "<line x1=\"" << num(ml) << "\" y1=\"" << num(sy(ref_y)) << "\" x2=\"" << num(ml + pw)
      << "\" y2=\"" << num(sy(ref_y))
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }
  if (!xs.empty()) {
    f << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) f << " ";
      f << num(sx(xs[i])) << "," << num(sy(ys[i]));
    }
    f << "\"/>\n";
  }
  f << "</svg>\n";
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace crisp::tools

#endif
