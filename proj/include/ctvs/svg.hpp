#pragma once

// Minimal SVG line chart: one polyline of log10 magnitudes against rank,
// with axis ticks and a vertical marker at the transition point.

#include <ostream>

#include "ctvs/io.hpp"

namespace ctvs {

inline void write_rearrangement_svg(std::ostream& os, const std::vector<double>& magnitudes, std::size_t transition,
                                    const std::string& title) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 30, kBottom = 40;
  constexpr double kFloor = -16.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::vector<double> logs;
  logs.reserve(magnitudes.size());
  for (double v : magnitudes) logs.push_back(v > 0.0 ? std::max(std::log10(v), kFloor) : kFloor);
  double hi = logs.empty() ? 0.0 : *std::max_element(logs.begin(), logs.end());
  double lo = logs.empty() ? -1.0 : *std::min_element(logs.begin(), logs.end());
  hi = std::ceil(hi);
  lo = std::floor(lo);
  if (hi <= lo) lo = hi - 1.0;

  const std::size_t count = std::max<std::size_t>(magnitudes.size(), 1);
  auto x_of = [&](double rank) { return kLeft + plot_w * (count > 1 ? rank / static_cast<double>(count - 1) : 0.5); };
  auto y_of = [&](double lg) { return kTop + plot_h * (hi - lg) / (hi - lo); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";

  const int decades = static_cast<int>(hi - lo);
  const int step = std::max(1, decades / 8);
  for (int d = 0; d <= decades; d += step) {
    const double lg = lo + d;
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y_of(lg) << "\" x2=\"" << kLeft << "\" y2=\"" << y_of(lg) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << y_of(lg) + 4 << "\" font-size=\"10\" text-anchor=\"end\">1e"
       << static_cast<int>(lg) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double rank = static_cast<double>(count - 1) * i / 4.0;
    os << "<line x1=\"" << x_of(rank) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << x_of(rank) << "\" y2=\"" << kTop + plot_h + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x_of(rank) << "\" y=\"" << kTop + plot_h + 18 << "\" font-size=\"10\" text-anchor=\"middle\">"
       << static_cast<std::size_t>(rank) + 1 << "</text>\n";
  }

  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < logs.size(); ++i) os << (i ? " " : "") << x_of(static_cast<double>(i)) << ',' << y_of(logs[i]);
  os << "\"/>\n";

  if (transition < magnitudes.size()) {
    const double x = x_of(static_cast<double>(transition));
    os << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\"" << kTop + plot_h
       << "\" stroke=\"firebrick\" stroke-dasharray=\"4,3\"/>\n";
    os << "<text x=\"" << x + 4 << "\" y=\"" << kTop + 12 << "\" font-size=\"11\" fill=\"firebrick\">n=" << transition << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace ctvs
