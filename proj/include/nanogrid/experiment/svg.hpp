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

#ifndef NANOGRID_EXPERIMENT_SVG_HPP_
#define NANOGRID_EXPERIMENT_SVG_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace nanogrid::experiment {

// Minimal static SVG charts for run reports. Output is deterministic for
// identical input.

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> groups;              // x axis categories
  std::vector<std::string> series;              // one bar per series per group
  std::vector<std::vector<double>> values;      // [series][group]
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::string> series;
  std::vector<std::vector<double>> values;      // [series][x], x = 1..n
};

std::string render_svg(const BarChart& chart);
std::string render_svg(const LineChart& chart);
void write_svg(const std::filesystem::path& path, const std::string& svg);

}  // namespace nanogrid::experiment

#endif  // NANOGRID_EXPERIMENT_SVG_HPP_
