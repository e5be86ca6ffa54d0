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

#include "nanogrid/experiment/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "nanogrid/errors.hpp"

#ifndef NANOGRID_VERSION
#define NANOGRID_VERSION "dev"
#endif

namespace nanogrid::experiment {
namespace {

namespace fs = std::filesystem;

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

EpisodeConfig episode(const ExperimentConfig& cfg, int day) {
  EpisodeConfig ec;
  ec.day = day;
  ec.horizon = cfg.horizon;
  ec.pw_max_kw = cfg.pw_max_kw;
  return ec;
}

fs::path seed_dir(const fs::path& root, std::uint64_t seed) {
  return root / ("seed_" + std::to_string(seed));
}

fs::path checkpoint_path(const fs::path& dir, int agent_id) {
  return dir / ("agent_" + std::to_string(agent_id) + ".ngck");
}

void atomic_write(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

}  // namespace

std::shared_ptr<const Scenario> build_scenario(const ExperimentConfig& cfg,
                                               std::uint64_t seed) {
  ScenarioConfig sc = cfg.scenario;
  sc.seed = seed;
  return std::make_shared<const Scenario>(std::move(sc));
}

ObsScale observation_scale(const ExperimentConfig& cfg, const Scenario& scenario) {
  ObsScale s;
  double power = 0.0;
  for (int d = 0; d < cfg.train_days; ++d) {
    const DayData& day = scenario.day(d);
    for (int k = 0; k < scenario.clusters(); ++k) {
      for (int n = 0; n < kIntervalsPerDay; ++n) {
        power = std::max({power, day.load_kw[k][n], day.res_kw(k, n)});
      }
    }
  }
  s.power = power > 0.0 ? power : 1.0;
  const TariffSchedule& tariff = scenario.tariff();
  double tou = 0.0;
  for (const TouBand& b : tariff.bands()) tou = std::max(tou, b.rate);
  double smp = 0.0;
  for (const auto& [hour, price] : tariff.smp().samples()) smp = std::max(smp, price);
  s.price = std::max(tou + tariff.tiers().back().rate + tariff.ccec().total(), smp);
  return s;
}

AgentSet make_agents(const ExperimentConfig& cfg, const Scenario& scenario,
                     std::uint64_t seed) {
  const ObsScale scale = observation_scale(cfg, scenario);
  AgentSet out;
  for (int k = 0; k < scenario.clusters(); ++k) {
    agents::AgentConfig ac;
    ac.variant = cfg.variant;
    ac.hp = cfg.hp;
    ac.clusters = scenario.clusters();
    ac.power_scale = scale.power;
    ac.price_scale = scale.price;
    ac.seed = seed;
    ac.id = k;
    out.push_back(agents::make_agent(ac));
  }
  return out;
}

std::vector<CurveRow> train_agents(const ExperimentConfig& cfg,
                                   std::shared_ptr<const Scenario> scenario,
                                   AgentSet& agents) {
  Environment env(scenario, cfg.env);
  const int K = env.clusters();
  if (static_cast<int>(agents.size()) != K) {
    throw ContractError("train_agents: need one agent per cluster");
  }
  std::vector<CurveRow> curve;
  curve.reserve(static_cast<std::size_t>(cfg.epochs) * K);
  std::vector<int> idx(K);
  std::vector<TradeAction> actions(K);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    MarketState state = env.reset(episode(cfg, epoch % cfg.train_days));
    for (auto& a : agents) a->begin_episode();
    std::vector<double> reward_sum(K, 0.0);
    int steps = 0;
    while (!env.done()) {
      const std::vector<double> s = state.flatten();
      for (int k = 0; k < K; ++k) {
        idx[k] = agents[k]->act(s, true);
        actions[k] = action_from_index(cfg.env.action_space, idx[k]);
      }
      StepResult r = env.step(actions);
      const std::vector<double> next = r.state.flatten();
      for (int k = 0; k < K; ++k) {
        try {
          agents[k]->observe(s, idx[k], r.rewards[k], next, r.done);
        } catch (const std::runtime_error& e) {
          throw std::runtime_error("epoch " + std::to_string(epoch + 1) + ", agent " +
                                   std::to_string(k + 1) + ": " + e.what());
        }
        reward_sum[k] += r.rewards[k];
      }
      ++steps;
      state = std::move(r.state);
    }
    for (int k = 0; k < K; ++k) {
      curve.push_back({epoch + 1, k + 1, reward_sum[k] / steps, agents[k]->epsilon(),
                       agents[k]->episode_loss()});
      agents[k]->end_episode();
    }
  }
  return curve;
}

EvalResult evaluate_agents(const ExperimentConfig& cfg,
                           std::shared_ptr<const Scenario> scenario, AgentSet* agents,
                           StepTraceWriter* trace) {
  if (cfg.eval_days < 1) throw ConfigError("invalid config: evaluation needs eval_days >= 1");
  Environment env(scenario, cfg.env);
  const int K = env.clusters();
  const double dt = kIntervalHours;
  EvalResult r;
  for (auto* v : {&r.cost_usd, &r.baseline_cost_usd, &r.consumption_kwh, &r.traded_kwh,
                  &r.baseline_consumption_kwh, &r.baseline_traded_kwh, &r.avg_reward}) {
    v->assign(K, 0.0);
  }
  long steps = 0;
  std::vector<TradeAction> actions(K);
  for (int d = cfg.train_days; d < cfg.train_days + cfg.eval_days; ++d) {
    MarketState state = env.reset(episode(cfg, d));
    if (agents) {
      for (auto& a : *agents) a->begin_episode();
    }
    while (!env.done()) {
      if (agents) {
        const std::vector<double> s = state.flatten();
        for (int k = 0; k < K; ++k) {
          actions[k] = action_from_index(cfg.env.action_space, (*agents)[k]->act(s, false));
        }
      } else {
        actions = env.baseline_actions();
      }
      StepResult res = env.step(actions);
      if (trace) trace->append(env);
      for (int k = 0; k < K; ++k) {
        const ClusterStep& l = env.last_learner().clusters[k];
        const ClusterStep& b = env.last_baseline().clusters[k];
        r.consumption_kwh[k] += l.mix.served() * dt;
        r.baseline_consumption_kwh[k] += b.mix.served() * dt;
        r.traded_kwh[k] += l.p2p_buy_kwh + l.p2p_sell_kwh;
        r.baseline_traded_kwh[k] += b.p2p_buy_kwh + b.p2p_sell_kwh;
        r.avg_reward[k] += res.rewards[k];
      }
      ++steps;
      state = std::move(res.state);
    }
    for (int k = 0; k < K; ++k) {
      r.cost_usd[k] += env.episode_cost()[k];
      r.baseline_cost_usd[k] += env.episode_baseline_cost()[k];
    }
  }
  for (double& x : r.avg_reward) x /= static_cast<double>(steps);
  return r;
}

void write_curve(const fs::path& path, const std::vector<CurveRow>& curve) {
  CsvWriter out(path, {"epoch", "agent_id", "avg_reward", "epsilon", "loss"});
  for (const CurveRow& c : curve) {
    out.row(c.epoch, c.agent_id, c.avg_reward, c.epsilon, c.loss);
  }
}

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const fs::path& dir) {
  SeedResult result;
  result.seed = seed;
  const double t0 = thread_cpu_seconds();
  auto scenario = build_scenario(cfg, seed);
  AgentSet agents;
  if (!cfg.is_baseline()) {
    agents = make_agents(cfg, *scenario, seed);
    result.curve = train_agents(cfg, scenario, agents);
  }
  const double t1 = thread_cpu_seconds();
  std::unique_ptr<StepTraceWriter> trace;
  if (!dir.empty()) {
    fs::create_directories(dir);
    if (!cfg.is_baseline()) {
      write_curve(dir / "training_curve.csv", result.curve);
      for (std::size_t k = 0; k < agents.size(); ++k) {
        agents[k]->save(checkpoint_path(dir, static_cast<int>(k) + 1).string());
      }
    }
    if (cfg.eval_days > 0) trace = std::make_unique<StepTraceWriter>(dir / "step_trace.csv");
  }
  if (cfg.eval_days > 0) {
    result.eval =
        evaluate_agents(cfg, scenario, cfg.is_baseline() ? nullptr : &agents, trace.get());
  }
  result.train_seconds = t1 - t0;
  result.eval_seconds = thread_cpu_seconds() - t1;
  return result;
}

std::vector<SeedResult> run_seeds(const ExperimentConfig& cfg, bool write_files) {
  const std::size_t n = cfg.seeds.size();
  std::vector<SeedResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  unsigned workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const fs::path dir = write_files ? seed_dir(cfg.output_dir, cfg.seeds[i]) : fs::path{};
        results[i] = run_seed(cfg, cfg.seeds[i], dir);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  nlohmann::json j = {{"config_hash", m.config_hash},
                      {"scenario_hash", m.scenario_hash},
                      {"seeds", m.seeds},
                      {"code_version", m.code_version},
                      {"started_utc", m.started_utc},
                      {"finished_utc", m.finished_utc},
                      {"files", m.files}};
  fs::create_directories(dir);
  atomic_write(dir / "manifest.json", j.dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ConfigError("missing " + (dir / "manifest.json").string());
  RunManifest m;
  try {
    nlohmann::json j;
    in >> j;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.scenario_hash = j.at("scenario_hash").get<std::string>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.code_version = j.at("code_version").get<std::string>();
    m.started_utc = j.at("started_utc").get<std::string>();
    m.finished_utc = j.at("finished_utc").get<std::string>();
    m.files = j.at("files").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed " + (dir / "manifest.json").string() + ": " + e.what());
  }
  return m;
}

void write_evaluation(const fs::path& path, const std::vector<SeedResult>& results) {
  CsvWriter out(path, {"seed", "cluster_id", "cost_usd", "baseline_cost_usd",
                       "consumption_kwh", "baseline_consumption_kwh", "traded_kwh",
                       "baseline_traded_kwh", "avg_reward"});
  for (const SeedResult& s : results) {
    for (std::size_t k = 0; k < s.eval.cost_usd.size(); ++k) {
      out.row(std::to_string(s.seed), static_cast<int>(k) + 1, s.eval.cost_usd[k],
              s.eval.baseline_cost_usd[k], s.eval.consumption_kwh[k],
              s.eval.baseline_consumption_kwh[k], s.eval.traded_kwh[k],
              s.eval.baseline_traded_kwh[k], s.eval.avg_reward[k]);
    }
  }
}

namespace {

std::vector<std::string> run_files(const ExperimentConfig& cfg) {
  std::vector<std::string> files = {"config.json", "evaluation.csv"};
  for (std::uint64_t seed : cfg.seeds) {
    const std::string d = "seed_" + std::to_string(seed) + "/";
    if (!cfg.is_baseline()) {
      files.push_back(d + "training_curve.csv");
      for (int k = 1; k <= cfg.scenario.clusters; ++k) {
        files.push_back(d + "agent_" + std::to_string(k) + ".ngck");
        files.push_back(d + "agent_" + std::to_string(k) + ".ngck.json");
      }
    }
    files.push_back(d + "step_trace.csv");
  }
  return files;
}

RunManifest manifest_for(const ExperimentConfig& cfg, std::string started) {
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.scenario_hash = scenario_hash(cfg);
  m.seeds = cfg.seeds;
  m.code_version = NANOGRID_VERSION;
  m.started_utc = std::move(started);
  m.files = run_files(cfg);
  return m;
}

}  // namespace

std::vector<SeedResult> run_train(const ExperimentConfig& cfg) {
  if (cfg.eval_days < 1) throw ConfigError("invalid config: train needs eval_days >= 1");
  const std::string started = utc_now();
  fs::create_directories(cfg.output_dir);
  atomic_write(cfg.output_dir / "config.json", to_json(cfg) + "\n");
  std::vector<SeedResult> results = run_seeds(cfg, true);
  write_evaluation(cfg.output_dir / "evaluation.csv", results);
  RunManifest m = manifest_for(cfg, started);
  m.finished_utc = utc_now();
  write_manifest(cfg.output_dir, m);
  return results;
}

std::vector<SeedResult> run_evaluate(const ExperimentConfig& cfg) {
  if (cfg.eval_days < 1) throw ConfigError("invalid config: evaluate needs eval_days >= 1");
  const std::string started = utc_now();
  std::vector<SeedResult> results;
  for (std::uint64_t seed : cfg.seeds) {
    SeedResult r;
    r.seed = seed;
    const fs::path dir = seed_dir(cfg.output_dir, seed);
    fs::create_directories(dir);
    auto scenario = build_scenario(cfg, seed);
    AgentSet agents;
    if (!cfg.is_baseline()) {
      agents = make_agents(cfg, *scenario, seed);
      for (std::size_t k = 0; k < agents.size(); ++k) {
        agents[k]->load(checkpoint_path(dir, static_cast<int>(k) + 1).string());
      }
    }
    StepTraceWriter trace(dir / "step_trace.csv");
    r.eval = evaluate_agents(cfg, scenario, cfg.is_baseline() ? nullptr : &agents, &trace);
    results.push_back(std::move(r));
  }
  write_evaluation(cfg.output_dir / "evaluation.csv", results);
  if (!fs::exists(cfg.output_dir / "config.json")) {
    atomic_write(cfg.output_dir / "config.json", to_json(cfg) + "\n");
  }
  RunManifest m = manifest_for(cfg, started);
  m.finished_utc = utc_now();
  write_manifest(cfg.output_dir, m);
  return results;
}

void run_simulate(const ExperimentConfig& cfg) {
  const std::uint64_t seed = cfg.seeds.front();
  auto scenario = build_scenario(cfg, seed);
  fs::create_directories(cfg.output_dir);
  ExperimentConfig sim = cfg;
  Environment env(scenario, cfg.env);
  StepTraceWriter trace(cfg.output_dir / "step_trace.csv");
  CsvWriter rounds(cfg.output_dir / "trading_rounds.csv", round_trace_header());
  for (int d = 0; d < scenario->days(); ++d) {
    env.reset(episode(cfg, d));
    while (!env.done()) {
      env.step(env.baseline_actions());
      trace.append(env);
      append_round_trace(rounds, env.last_learner().round);
    }
  }
  atomic_write(cfg.output_dir / "config.json", to_json(sim) + "\n");
}

void run_synth_data(const ExperimentConfig& cfg) {
  const std::uint64_t seed = cfg.seeds.front();
  auto scenario = build_scenario(cfg, seed);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const int K = scenario->clusters();
  GenerationProfile gen(K, scenario->days() * kIntervalsPerDay);
  CsvWriter demand(dir / "demand.csv",
                   {"interval", "cluster_id", "load_kw", "unscheduled_kw"});
  for (int d = 0; d < scenario->days(); ++d) {
    const DayData& day = scenario->day(d);
    for (int n = 0; n < kIntervalsPerDay; ++n) {
      const long abs_n = static_cast<long>(d) * kIntervalsPerDay + n;
      for (int k = 0; k < K; ++k) {
        gen.set(k, static_cast<int>(abs_n), day.wind_kw[k][n], day.pv_kw[k][n]);
        demand.row(abs_n, k + 1, day.load_kw[k][n], day.unscheduled_kw[k][n]);
      }
    }
  }
  gen.to_csv(dir / "generation.csv");
  CsvWriter smp(dir / "smp.csv", {"hour_of_year", "smp_usd_per_kwh"});
  for (int h = 0; h < scenario->days() * 24; ++h) {
    smp.row(h, scenario->tariff().smp_at(static_cast<double>(h)));
  }
  save_appliance_catalog(dir / "appliances.csv", cfg.scenario.catalog);
}

}  // namespace nanogrid::experiment
