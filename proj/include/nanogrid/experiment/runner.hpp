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

#ifndef NANOGRID_EXPERIMENT_RUNNER_HPP_
#define NANOGRID_EXPERIMENT_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "nanogrid/agents/agent.hpp"
#include "nanogrid/experiment/config.hpp"

namespace nanogrid::experiment {

using AgentSet = std::vector<std::unique_ptr<agents::Agent>>;

// Training curve row; file schema: epoch, agent_id, avg_reward, epsilon, loss.
struct CurveRow {
  int epoch = 0;     // 1-based
  int agent_id = 0;  // 1-based, equals the cluster id
  double avg_reward = 0.0;
  double epsilon = 0.0;
  double loss = 0.0;
};

// Per-cluster totals over the evaluation days.
struct EvalResult {
  std::vector<double> cost_usd;
  std::vector<double> baseline_cost_usd;
  std::vector<double> consumption_kwh;  // served demand
  std::vector<double> traded_kwh;       // bought plus sold, both channels
  std::vector<double> baseline_consumption_kwh;
  std::vector<double> baseline_traded_kwh;
  std::vector<double> avg_reward;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<CurveRow> curve;
  EvalResult eval;
  double train_seconds = 0.0;  // CPU time of this seed's worker
  double eval_seconds = 0.0;
};

// The synthetic world of one seed.
std::shared_ptr<const Scenario> build_scenario(const ExperimentConfig& cfg,
                                               std::uint64_t seed);

// Observation scales handed to the agents: the largest demand or RES value
// over the training days, and the highest price the tariff can produce.
struct ObsScale {
  double power = 1.0;
  double price = 1.0;
};
ObsScale observation_scale(const ExperimentConfig& cfg, const Scenario& scenario);

AgentSet make_agents(const ExperimentConfig& cfg, const Scenario& scenario,
                     std::uint64_t seed);

// Trains the agents for cfg.epochs episodes over the training pool and
// returns the curve. Throws std::runtime_error naming the epoch and agent
// when a loss turns non-finite.
std::vector<CurveRow> train_agents(const ExperimentConfig& cfg,
                                   std::shared_ptr<const Scenario> scenario,
                                   AgentSet& agents);

// Greedy rollout over the evaluation days in a fresh environment. With no
// agents every cluster follows the baseline rule. The trace, when given,
// receives every step.
EvalResult evaluate_agents(const ExperimentConfig& cfg,
                           std::shared_ptr<const Scenario> scenario, AgentSet* agents,
                           StepTraceWriter* trace = nullptr);

// Trains (unless baseline) and evaluates one seed. When `dir` is non-empty
// the seed's curve, checkpoints and evaluation trace are written there.
SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                    const std::filesystem::path& dir = {});

// All seeds of cfg on a pool of worker threads; results in seed order.
std::vector<SeedResult> run_seeds(const ExperimentConfig& cfg, bool write_files);

struct RunManifest {
  std::string config_hash;
  std::string scenario_hash;
  std::vector<std::uint64_t> seeds;
  std::string code_version;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::string> files;  // relative to the run directory
};
// Written to <dir>/manifest.json through a temporary file and a rename.
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& dir);
std::string utc_now();

// `train`: curves, checkpoints, evaluation and manifest under output_dir.
std::vector<SeedResult> run_train(const ExperimentConfig& cfg);
// `evaluate`: loads the checkpoints of a finished run and re-evaluates.
std::vector<SeedResult> run_evaluate(const ExperimentConfig& cfg);
// `simulate`: baseline rule over every scenario day with step and trading
// round traces.
void run_simulate(const ExperimentConfig& cfg);
// `synth-data`: generation, demand, SMP and appliance CSVs for the first seed.
void run_synth_data(const ExperimentConfig& cfg);

// Evaluation CSV schema: seed, cluster_id, cost_usd, baseline_cost_usd,
// consumption_kwh, baseline_consumption_kwh, traded_kwh, baseline_traded_kwh,
// avg_reward.
void write_evaluation(const std::filesystem::path& path,
                      const std::vector<SeedResult>& results);
void write_curve(const std::filesystem::path& path, const std::vector<CurveRow>& curve);

}  // namespace nanogrid::experiment

#endif  // NANOGRID_EXPERIMENT_RUNNER_HPP_
