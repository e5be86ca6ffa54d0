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

#ifndef NANOGRID_EXPERIMENT_REPORT_HPP_
#define NANOGRID_EXPERIMENT_REPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "nanogrid/experiment/config.hpp"
#include "nanogrid/experiment/runner.hpp"

namespace nanogrid::experiment {

// (baseline - variant) / baseline * 100. DomainError when the baseline cost
// is zero or either value is not finite.
double savings_percent(double baseline_cost, double variant_cost);

// Cost table in the layout of the published summary: one row pair per
// cluster (cost, saving) and one column per variant.
struct CompareTable {
  std::vector<int> cluster_ids;
  std::vector<std::string> variants;
  std::vector<double> baseline;                // [cluster]
  std::vector<std::vector<double>> cost;       // [variant][cluster]
  std::vector<std::vector<double>> saving;     // [variant][cluster], percent
  std::vector<double> mean_saving;             // [variant], arithmetic mean over clusters
};

CompareTable make_compare_table(std::vector<int> cluster_ids, std::vector<double> baseline,
                                std::vector<std::string> variants,
                                std::vector<std::vector<double>> cost);

// Schema: cluster, metric, baseline, <variant>...; metric is cost_usd or
// saving_pct, and a final row "mean, saving_pct_arithmetic_mean" holds the
// per-variant mean saving over the listed clusters.
void write_compare_table(const std::filesystem::path& path, const CompareTable& table);

// One finished train or evaluate run, averaged over its seeds.
struct RunSummary {
  std::filesystem::path dir;
  std::string name;  // variant name or "baseline"
  bool baseline = false;
  RunManifest manifest;
  std::vector<int> cluster_ids;
  std::vector<double> cost, baseline_cost;
  std::vector<double> consumption, baseline_consumption;
  std::vector<double> traded, baseline_traded;
  std::vector<double> curve;  // mean avg_reward per epoch over seeds and agents
};

// Throws std::runtime_error listing the expected files when any is missing.
RunSummary load_run(const std::filesystem::path& dir);

// `compare`: loads cfg.compare_runs, rejects runs whose scenario or seed set
// differ, and writes compare_cost.csv, compare_consumption.csv,
// compare_traded.csv, compare_curve.csv, compare_summary.json and a manifest
// to cfg.output_dir. The baseline column comes from a baseline run when one
// is listed, otherwise from the shadow baseline of the first run.
CompareTable run_compare(const ExperimentConfig& cfg);

// `report`: SVG charts and tables for a run or compare directory, written
// to <dir>/report. Returns the files written.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir);

}  // namespace nanogrid::experiment

#endif  // NANOGRID_EXPERIMENT_REPORT_HPP_
