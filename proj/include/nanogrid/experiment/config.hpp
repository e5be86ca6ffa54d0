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

#ifndef NANOGRID_EXPERIMENT_CONFIG_HPP_
#define NANOGRID_EXPERIMENT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nanogrid/agents/hyperparams.hpp"
#include "nanogrid/env.hpp"
#include "nanogrid/scenario.hpp"

namespace nanogrid::experiment {

inline constexpr const char* kBaseline = "baseline";

struct ExperimentConfig {
  // scenario.seed is overwritten by the run seed; every seed gets its own
  // synthetic world.
  ScenarioConfig scenario;
  int train_days = 30;  // training pool: days [0, train_days)
  int eval_days = 7;    // evaluation: the days after the pool
  int horizon = kIntervalsPerDay;
  std::optional<double> pw_max_kw;  // fixed PW^max; otherwise the percentile rule
  EnvOptions env;
  std::optional<std::filesystem::path> appliance_csv;

  std::string algorithm = "n_ppo";  // a variant name or "baseline"
  agents::Variant variant;          // resolved from algorithm and overrides
  agents::Hyperparams hp;
  int epochs = 200;

  std::vector<std::uint64_t> seeds = {1};
  std::filesystem::path output_dir = "runs/default";
  int workers = 0;  // parallel seeds; 0 = hardware concurrency
  std::vector<std::filesystem::path> compare_runs;

  bool is_baseline() const { return algorithm == kBaseline; }
  // ConfigError naming the offending field.
  void validate() const;
};

// Command-line overrides applied after the file is read.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algorithm;
  std::optional<std::string> action_space;
  bool gcn = false;
  std::optional<std::filesystem::path> output_dir;
};

// Reads a JSON config. Every failure is a ConfigError whose message starts
// with one of: "config file not found", "config parse error",
// "unknown key", "unknown algorithm", "invalid config".
ExperimentConfig load_config(const std::filesystem::path& path,
                             const Overrides& overrides = {});
ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const Overrides& overrides = {});
// Defaults plus overrides, as if read from "{}".
ExperimentConfig default_config(const Overrides& overrides = {});

// Canonical JSON of every resolved field (stable key order).
std::string to_json(const ExperimentConfig& cfg);
// FNV-1a over to_json(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);
// Hash of the fields that shape the scenario and cost accounting only;
// runs can be compared when these match.
std::string scenario_hash(const ExperimentConfig& cfg);

}  // namespace nanogrid::experiment

#endif  // NANOGRID_EXPERIMENT_CONFIG_HPP_
