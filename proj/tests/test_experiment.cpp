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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nanogrid/csv.hpp"
#include "nanogrid/errors.hpp"
#include "nanogrid/experiment/report.hpp"
#include "nanogrid/experiment/runner.hpp"
#include "nanogrid/experiment/svg.hpp"
#include "run_fixtures.hpp"

namespace nanogrid::experiment {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "test.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ng_exp_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(Config, Defaults) {
  const ExperimentConfig cfg = default_config();
  EXPECT_EQ(cfg.algorithm, "n_ppo");
  EXPECT_EQ(cfg.variant.algo, agents::Algorithm::kPpo);
  EXPECT_EQ(cfg.variant.space, ActionSpace::kUtRes);
  EXPECT_EQ(cfg.scenario.clusters, 10);
  EXPECT_EQ(cfg.epochs, 200);
  EXPECT_EQ(cfg.train_days, 30);
  EXPECT_EQ(cfg.eval_days, 7);
  EXPECT_DOUBLE_EQ(cfg.hp.gamma, 0.99);
  EXPECT_EQ(cfg.env.quantity_rule, QuantityRule::kNetPosition);
}

TEST(Config, OverridesResolveVariant) {
  Overrides o;
  o.algorithm = "drqn";
  o.action_space = "ut_res";
  o.gcn = true;
  o.seed = 42;
  const ExperimentConfig cfg = default_config(o);
  EXPECT_EQ(cfg.variant.name(), "n_gcn_drqn");
  EXPECT_EQ(cfg.seeds, std::vector<std::uint64_t>{42});
  EXPECT_EQ(cfg.hp.train_every, 32);

  const ExperimentConfig parsed =
      parse_config(R"({"algorithm": {"name": "n_ppo"}, "seeds": [3, 4]})", "x");
  EXPECT_EQ(parsed.variant.space, ActionSpace::kUtRes);
  EXPECT_EQ(parsed.seeds.size(), 2u);
}

TEST(Config, ErrorPrefixes) {
  EXPECT_EQ(error_of(R"({"scenario": {"clusterz": 3}})").rfind("unknown key", 0), 0u);
  EXPECT_EQ(error_of(R"({"algorithm": {"name": "a3c"}})").rfind("unknown algorithm", 0), 0u);
  EXPECT_EQ(error_of("{ not json").rfind("config parse error", 0), 0u);
  EXPECT_EQ(error_of(R"({"scenario": {"clusters": 0}})").rfind("invalid config", 0), 0u);
  EXPECT_EQ(error_of(R"({"algorithm": {"hyperparams": {"gamma": 1.0}}})").rfind("invalid config", 0),
            0u);
  try {
    load_config("/nonexistent/cfg.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("config file not found", 0), 0u);
  }
}

TEST(Config, JsonRoundTripAndHashes) {
  const ExperimentConfig a = default_config();
  const ExperimentConfig back = parse_config(to_json(a), "roundtrip");
  EXPECT_EQ(to_json(back), to_json(a));
  EXPECT_EQ(config_hash(back), config_hash(a));
  EXPECT_EQ(config_hash(a).size(), 16u);

  ExperimentConfig b = a;
  b.epochs = 201;
  EXPECT_NE(config_hash(b), config_hash(a));
  EXPECT_EQ(scenario_hash(b), scenario_hash(a));
  b = a;
  b.scenario.clusters = 9;
  EXPECT_NE(scenario_hash(b), scenario_hash(a));
  b = a;
  b.scenario.smp_mean = 0.1;
  EXPECT_NE(scenario_hash(b), scenario_hash(a));
  b = a;
  b.seeds = {2};
  EXPECT_NE(scenario_hash(b), scenario_hash(a));
}

TEST(Savings, PublishedPairs) {
  EXPECT_NEAR(savings_percent(682.4, 641.5), 5.99, 0.01);
  for (std::size_t c = 0; c < fixture::kTableClusters.size(); ++c) {
    for (std::size_t v = 0; v < fixture::kTableVariants.size(); ++v) {
      const double b = fixture::kTableBaseline[c], x = fixture::kTableCost[c][v];
      EXPECT_DOUBLE_EQ(savings_percent(b, x), (b - x) / b * 100.0);
      EXPECT_NEAR(savings_percent(b, x), fixture::kTableSaving[c][v], 0.01)
          << fixture::kTableVariants[v] << " cluster " << fixture::kTableClusters[c];
    }
  }
  EXPECT_THROW(savings_percent(0.0, 1.0), DomainError);
  EXPECT_THROW(savings_percent(NAN, 1.0), DomainError);
  EXPECT_LT(savings_percent(100.0, 110.0), 0.0);
}

TEST_F(TempDir, CompareTableFromRuns) {
  ExperimentConfig cfg = default_config();
  fixture::write_fake_run(dir_ / "baseline", "baseline", fixture::spread(fixture::kTableBaseline),
                          fixture::spread(fixture::kTableBaseline));
  cfg.compare_runs.push_back(dir_ / "baseline");
  for (std::size_t v = 0; v < fixture::kTableVariants.size(); ++v) {
    std::vector<double> three;
    for (std::size_t c = 0; c < 3; ++c) three.push_back(fixture::kTableCost[c][v]);
    const fs::path d = dir_ / fixture::kTableVariants[v];
    fixture::write_fake_run(d, fixture::kTableVariants[v], fixture::spread(three),
                            fixture::spread(fixture::kTableBaseline));
    cfg.compare_runs.push_back(d);
  }
  cfg.output_dir = dir_ / "cmp";
  const CompareTable t = run_compare(cfg);
  ASSERT_EQ(t.variants, fixture::kTableVariants);
  const std::vector<std::size_t> rows = {0, 4, 9};
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(t.baseline[rows[c]], fixture::kTableBaseline[c]);
    for (std::size_t v = 0; v < t.variants.size(); ++v) {
      EXPECT_NEAR(t.saving[v][rows[c]], fixture::kTableSaving[c][v], 0.01);
    }
  }
  for (const char* f : {"compare_cost.csv", "compare_consumption.csv", "compare_traded.csv",
                        "compare_curve.csv", "compare_summary.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / f)) << f;
  }
  const CsvTable csv = read_csv(cfg.output_dir / "compare_cost.csv");
  EXPECT_EQ(csv.header.front(), "cluster");
  EXPECT_EQ(csv.rows.back()[1], "saving_pct_arithmetic_mean");

  const auto charts = emit_report(cfg.output_dir);
  EXPECT_EQ(charts.size(), 4u);
  for (const auto& p : charts) {
    EXPECT_EQ(slurp(p).rfind("<svg", 0), 0u) << p;
  }
}

TEST_F(TempDir, CompareRejectsMismatchedScenarios) {
  const std::vector<double> c = {1.0, 2.0};
  fixture::write_fake_run(dir_ / "a", "dqn", c, c);
  fixture::write_fake_run(dir_ / "b", "ppo", c, c, {1}, 5);
  fixture::write_fake_run(dir_ / "c", "ppo", c, c, {2});
  fixture::write_fake_run(dir_ / "d", "dqn", c, c);
  ExperimentConfig cfg = default_config();
  cfg.output_dir = dir_ / "cmp";
  for (const char* other : {"b", "c"}) {
    cfg.compare_runs = {dir_ / "a", dir_ / other};
    try {
      run_compare(cfg);
      FAIL() << other;
    } catch (const ConfigError& e) {
      EXPECT_EQ(std::string(e.what()).rfind("mismatched scenarios", 0), 0u);
    }
  }
  cfg.compare_runs = {dir_ / "a", dir_ / "d"};
  EXPECT_THROW(run_compare(cfg), ConfigError);
  cfg.compare_runs.clear();
  EXPECT_THROW(run_compare(cfg), ConfigError);
}

TEST_F(TempDir, ReportCases) {
  EXPECT_THROW(emit_report(dir_), std::runtime_error);
  const std::vector<double> c = {3.0, 4.0};
  fixture::write_fake_run(dir_ / "base", "baseline", c, c);
  const auto base = emit_report(dir_ / "base");
  EXPECT_TRUE(fs::exists(dir_ / "base" / "report" / "summary.csv"));
  EXPECT_EQ(base.size(), 3u);
  fixture::write_fake_run(dir_ / "run", "n_dqn", {2.0, 3.0}, c);
  const auto run = emit_report(dir_ / "run");
  EXPECT_EQ(run.size(), 5u);
  const CsvTable s = read_csv(dir_ / "run" / "report" / "summary.csv");
  EXPECT_EQ(s.rows.size(), 2u);
}

TEST(Svg, ShapeChecks) {
  BarChart b;
  b.title = "t";
  b.groups = {"1", "2"};
  b.series = {"a"};
  b.values = {{1.0, 2.0}};
  EXPECT_EQ(render_svg(b).rfind("<svg", 0), 0u);
  b.values = {{1.0}};
  EXPECT_THROW(render_svg(b), ContractError);
}

ExperimentConfig tiny(const fs::path& out, const std::string& algo) {
  Overrides o;
  o.algorithm = algo;
  o.output_dir = out;
  ExperimentConfig cfg = default_config(o);
  cfg.scenario.clusters = 3;
  cfg.scenario.days = 3;
  cfg.train_days = 2;
  cfg.eval_days = 1;
  cfg.epochs = 3;
  cfg.hp.batch = 16;
  cfg.hp.update_interval = 32;
  cfg.seeds = {7, 8};
  cfg.workers = 2;
  cfg.validate();
  return cfg;
}

TEST_F(TempDir, TrainIsByteDeterministic) {
  for (const char* algo : {"n_dqn", "gcn_bi_drqn", "n_ppo"}) {
    run_train(tiny(dir_ / "a", algo));
    run_train(tiny(dir_ / "b", algo));
    for (const char* f : {"evaluation.csv", "seed_7/training_curve.csv", "seed_7/step_trace.csv",
                          "seed_8/step_trace.csv"}) {
      const std::string a = slurp(dir_ / "a" / f);
      EXPECT_FALSE(a.empty()) << algo << " " << f;
      EXPECT_EQ(a, slurp(dir_ / "b" / f)) << algo << " " << f;
    }
    const RunManifest m = read_manifest(dir_ / "a");
    EXPECT_EQ(m.seeds, (std::vector<std::uint64_t>{7, 8}));
    for (const std::string& f : m.files) EXPECT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    fs::remove_all(dir_ / "a");
    fs::remove_all(dir_ / "b");
  }
}

TEST_F(TempDir, EvaluateReproducesTraining) {
  const ExperimentConfig cfg = tiny(dir_ / "r", "n_dqn");
  const auto trained = run_train(cfg);
  const auto again = run_evaluate(cfg);
  ASSERT_EQ(trained.size(), again.size());
  for (std::size_t s = 0; s < trained.size(); ++s) {
    EXPECT_EQ(trained[s].eval.cost_usd, again[s].eval.cost_usd);
    EXPECT_EQ(trained[s].eval.baseline_cost_usd, again[s].eval.baseline_cost_usd);
  }
}

TEST_F(TempDir, BaselineRunMatchesShadowWorld) {
  const auto base = run_seeds(tiny(dir_, "baseline"), false);
  const auto dqn = run_seeds(tiny(dir_, "n_dqn"), false);
  for (std::size_t s = 0; s < base.size(); ++s) {
    EXPECT_EQ(base[s].eval.cost_usd, base[s].eval.baseline_cost_usd);
    EXPECT_EQ(base[s].eval.cost_usd, dqn[s].eval.baseline_cost_usd);
    for (double r : base[s].eval.avg_reward) EXPECT_EQ(r, -1.0);
  }
}

TEST_F(TempDir, TrainRequiresEvaluationDays) {
  ExperimentConfig cfg = tiny(dir_, "dqn");
  cfg.eval_days = 0;
  EXPECT_THROW(run_train(cfg), ConfigError);
}

TEST_F(TempDir, SynthDataFiles) {
  ExperimentConfig cfg = tiny(dir_, "baseline");
  run_synth_data(cfg);
  for (const char* f : {"demand.csv", "generation.csv", "smp.csv", "appliances.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  const CsvTable d = read_csv(dir_ / "demand.csv");
  EXPECT_EQ(d.rows.size(), static_cast<std::size_t>(3 * 3 * kIntervalsPerDay));
}

}  // namespace
}  // namespace nanogrid::experiment
