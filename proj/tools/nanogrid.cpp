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

// nanogrid: command line front end for synthetic data, simulation, training,
// evaluation, comparison and reports.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nanogrid/csv.hpp"
#include "nanogrid/errors.hpp"
#include "nanogrid/experiment/config.hpp"
#include "nanogrid/experiment/report.hpp"
#include "nanogrid/experiment/runner.hpp"

namespace {

namespace ex = nanogrid::experiment;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algo;
  std::optional<std::string> action_space;
  bool gcn = false;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config (defaults when omitted)");
  cmd->add_option("--seed", f.seed, "run a single seed instead of the configured list");
  cmd->add_option("--algo", f.algo, "variant name, e.g. n_ppo, gcn_drqn, or baseline");
  cmd->add_option("--action-space", f.action_space, "res (3 actions) or ut_res (5 actions)")
      ->check(CLI::IsMember({"res", "ut_res"}));
  cmd->add_flag("--gcn", f.gcn, "prepend the graph convolution encoder");
  cmd->add_option("--out", f.out, "output directory");
}

ex::ExperimentConfig resolve(const Flags& f) {
  ex::Overrides o;
  o.seed = f.seed;
  o.algorithm = f.algo;
  o.action_space = f.action_space;
  o.gcn = f.gcn;
  if (f.out) o.output_dir = *f.out;
  return f.config.empty() ? ex::default_config(o) : ex::load_config(f.config, o);
}

void print_results(const std::vector<ex::SeedResult>& results) {
  for (const auto& r : results) {
    std::printf("seed %llu  train %.1f s  eval %.1f s\n",
                static_cast<unsigned long long>(r.seed), r.train_seconds, r.eval_seconds);
    for (std::size_t k = 0; k < r.eval.cost_usd.size(); ++k) {
      const double b = r.eval.baseline_cost_usd[k];
      std::printf("  cluster %2zu  cost %9.2f  baseline %9.2f", k + 1, r.eval.cost_usd[k], b);
      if (b != 0.0) std::printf("  saving %7.2f%%", ex::savings_percent(b, r.eval.cost_usd[k]));
      std::printf("\n");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nanogrid cluster P2P trading simulator and RL trainer"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::string> runs;
  std::string report_dir;

  auto* synth = app.add_subcommand("synth-data", "write generation, demand, SMP and appliance CSVs");
  auto* simulate = app.add_subcommand("simulate", "baseline simulation with step and round traces");
  auto* train = app.add_subcommand("train", "train agents, evaluate, write curves and checkpoints");
  auto* evaluate = app.add_subcommand("evaluate", "re-evaluate the checkpoints of a trained run");
  auto* compare = app.add_subcommand("compare", "cost and saving table across finished runs");
  auto* report = app.add_subcommand("report", "SVG charts for a run or compare directory");
  for (auto* cmd : {synth, simulate, train, evaluate, compare}) add_common(cmd, f);
  compare->add_option("runs", runs, "run directories (overrides compare.runs)");
  report->add_option("dir", report_dir, "run or compare directory");
  report->add_option("--out", f.out, "run or compare directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (report->parsed()) {
      const std::string dir = !report_dir.empty() ? report_dir : f.out.value_or("");
      if (dir.empty()) throw nanogrid::ConfigError("report: give a directory");
      for (const auto& p : ex::emit_report(dir)) std::printf("wrote %s\n", p.c_str());
      return 0;
    }
    ex::ExperimentConfig cfg = resolve(f);
    if (synth->parsed()) {
      ex::run_synth_data(cfg);
      std::printf("wrote synthetic data to %s\n", cfg.output_dir.c_str());
    } else if (simulate->parsed()) {
      ex::run_simulate(cfg);
      std::printf("wrote simulation traces to %s\n", cfg.output_dir.c_str());
    } else if (train->parsed()) {
      print_results(ex::run_train(cfg));
      std::printf("wrote run to %s\n", cfg.output_dir.c_str());
    } else if (evaluate->parsed()) {
      print_results(ex::run_evaluate(cfg));
    } else if (compare->parsed()) {
      if (!runs.empty()) cfg.compare_runs.assign(runs.begin(), runs.end());
      const ex::CompareTable t = ex::run_compare(cfg);
      for (std::size_t v = 0; v < t.variants.size(); ++v) {
        std::printf("%-14s mean saving (arithmetic, over clusters) %7.2f%%\n",
                    t.variants[v].c_str(), t.mean_saving[v]);
      }
      std::printf("wrote comparison to %s\n", cfg.output_dir.c_str());
    }
    return 0;
  } catch (const nanogrid::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
