// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

// Minimal static line plots. Non-finite points are skipped.

namespace sskernel::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct Band {
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color = "#1f77b4";
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

inline void write_plot(std::ostream& out, const std::string& title, const std::vector<Series>& series,
                       const std::vector<Band>& bands = {}) {
  constexpr double width = 720, height = 440, left = 70, right = 20, top = 40, bottom = 50;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  auto extend = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) extend(s.x[i], s.y[i]);
  }
  for (const auto& b : bands) {
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      extend(b.x[i], b.lower[i]);
      extend(b.x[i], b.upper[i]);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (y_hi == y_lo) y_hi = y_lo + 1;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
      << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
    out << "<text x=\"" << detail::fmt(px(xv)) << "\" y=\"" << height - bottom + 18
        << "\" text-anchor=\"middle\">" << detail::label(xv) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << detail::fmt(py(yv) + 4)
        << "\" text-anchor=\"end\">" << detail::label(yv) << "</text>\n";
  }
  for (const auto& b : bands) {
    out << "<polygon fill=\"" << b.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      out << detail::fmt(px(b.x[i])) << ',' << detail::fmt(py(b.upper[i])) << ' ';
    }
    for (std::size_t i = b.x.size(); i-- > 0;) {
      out << detail::fmt(px(b.x[i])) << ',' << detail::fmt(py(b.lower[i])) << ' ';
    }
    out << "\"/>\n";
  }
  double legend_y = top + 10;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << detail::fmt(px(s.x[i])) << ',' << detail::fmt(py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - right - 8 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" fill=\""
        << s.color << "\">" << s.label << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
}

}  // namespace sskernel::svg
