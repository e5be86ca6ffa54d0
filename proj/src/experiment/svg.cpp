// Copyright 2026 The Nanogrid P2P Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nanogrid/experiment/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nanogrid/errors.hpp"

namespace nanogrid::experiment {
namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

// Round step for about five ticks.
double tick_step(double span) {
  if (span <= 0.0) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  double y(double v) const {
    const double h = kHeight - kTop - kBottom;
    return kTop + h * (hi - v) / (hi - lo);
  }
};

Axis make_axis(double lo, double hi) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double step = tick_step(hi - lo);
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step};
}

void frame(std::ostringstream& o, const std::string& title, const std::string& y_label,
           const Axis& axis) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n"
    << "<text transform=\"translate(16," << num(kHeight / 2) << ") rotate(-90)\" "
    << "text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
  const double step = tick_step(axis.hi - axis.lo);
  for (double t = axis.lo; t <= axis.hi + 0.5 * step; t += step) {
    const double y = axis.y(t);
    o << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << num(y)
      << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n"
      << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
      << num(std::abs(t) < 1e-12 ? 0.0 : t) << "</text>\n";
  }
  o << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft << "\" y1=\"" << kTop << "\" y2=\""
    << kHeight - kBottom << "\" stroke=\"black\"/>\n";
}

void legend(std::ostringstream& o, const std::vector<std::string>& series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 16.0 * static_cast<double>(i);
    o << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << num(y) << "\" width=\"10\" "
      << "height=\"10\" fill=\"" << colour(i) << "\"/>\n"
      << "<text x=\"" << kWidth - kRight + 28 << "\" y=\"" << num(y + 9) << "\">"
      << escape(series[i]) << "</text>\n";
  }
}

void check_shape(const std::vector<std::string>& series,
                 const std::vector<std::vector<double>>& values, const char* what) {
  if (series.empty() || values.size() != series.size()) {
    throw ContractError(std::string(what) + ": one value row per series required");
  }
}

}  // namespace

std::string render_svg(const BarChart& c) {
  check_shape(c.series, c.values, "bar chart");
  double lo = 0.0, hi = 0.0;
  for (const auto& row : c.values) {
    if (row.size() != c.groups.size()) throw ContractError("bar chart: ragged values");
    for (double v : row) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  const Axis axis = make_axis(lo, hi);
  std::ostringstream o;
  frame(o, c.title, c.y_label, axis);
  const double plot_w = kWidth - kLeft - kRight;
  const double group_w = plot_w / static_cast<double>(std::max<std::size_t>(1, c.groups.size()));
  const double bar_w = 0.8 * group_w / static_cast<double>(c.series.size());
  const double zero = axis.y(0.0);
  for (std::size_t g = 0; g < c.groups.size(); ++g) {
    const double x0 = kLeft + group_w * static_cast<double>(g) + 0.1 * group_w;
    for (std::size_t s = 0; s < c.series.size(); ++s) {
      const double v = c.values[s][g];
      if (!std::isfinite(v)) continue;
      const double y = axis.y(v);
      o << "<rect x=\"" << num(x0 + bar_w * static_cast<double>(s)) << "\" y=\""
        << num(std::min(y, zero)) << "\" width=\"" << num(bar_w) << "\" height=\""
        << num(std::abs(zero - y)) << "\" fill=\"" << colour(s) << "\"><title>"
        << escape(c.series[s]) << ' ' << escape(c.groups[g]) << ": " << num(v)
        << "</title></rect>\n";
    }
    o << "<text x=\"" << num(x0 + 0.4 * group_w) << "\" y=\"" << kHeight - kBottom + 16
      << "\" text-anchor=\"middle\">" << escape(c.groups[g]) << "</text>\n";
  }
  o << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << num(zero)
    << "\" y2=\"" << num(zero) << "\" stroke=\"black\"/>\n";
  legend(o, c.series);
  o << "</svg>\n";
  return o.str();
}

std::string render_svg(const LineChart& c) {
  check_shape(c.series, c.values, "line chart");
  double lo = 0.0, hi = 0.0;
  bool any = false;
  std::size_t n = 0;
  for (const auto& row : c.values) {
    n = std::max(n, row.size());
    for (double v : row) {
      if (!std::isfinite(v)) continue;
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  const Axis axis = make_axis(lo, hi);
  std::ostringstream o;
  frame(o, c.title, c.y_label, axis);
  const double plot_w = kWidth - kLeft - kRight;
  auto x_of = [&](std::size_t i) {
    return n <= 1 ? kLeft : kLeft + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  for (std::size_t s = 0; s < c.series.size(); ++s) {
    o << "<polyline fill=\"none\" stroke=\"" << colour(s) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.values[s].size(); ++i) {
      if (!std::isfinite(c.values[s][i])) continue;
      o << num(x_of(i)) << ',' << num(axis.y(c.values[s][i])) << ' ';
    }
    o << "\"/>\n";
  }
  o << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << kHeight - kBottom
    << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << kLeft << "\" y=\"" << kHeight - kBottom + 16 << "\">1</text>\n"
    << "<text x=\"" << kWidth - kRight << "\" y=\"" << kHeight - kBottom + 16
    << "\" text-anchor=\"end\">" << n << "</text>\n"
    << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\">" << escape(c.x_label) << "</text>\n";
  legend(o, c.series);
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << svg;
}

}  // namespace nanogrid::experiment
