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

#ifndef NANOGRID_ENV_HPP_
#define NANOGRID_ENV_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nanogrid/action.hpp"
#include "nanogrid/assets.hpp"
#include "nanogrid/clock.hpp"
#include "nanogrid/csv.hpp"
#include "nanogrid/market.hpp"
#include "nanogrid/scenario.hpp"

namespace nanogrid {

// Observation: [D_1..D_K, S_1..S_K, DR, SMP].
struct MarketState {
  std::vector<double> demand_kw;
  std::vector<double> supply_kw;
  double dr = 0.0;
  double smp = 0.0;

  std::size_t size() const { return demand_kw.size() + supply_kw.size() + 2; }
  std::vector<double> flatten() const;
};

// Traded power for a label, as written in the action tables:
//   buy:  max{0, (pw_cluster - pw_res) - pw_max}
//   sell: max{0, pw_max - (pw_cluster + pw_res)}
//   idle: 0
// Throws DomainError on negative inputs.
double traded_power(TradeAction action, double pw_cluster_kw, double pw_res_kw,
                    double pw_max_kw);

// +1 when the baseline cost is strictly higher than the proposed cost,
// otherwise -1 (ties are penalized).
inline int interval_reward(double baseline_cost, double proposed_cost) {
  return baseline_cost > proposed_cost ? 1 : -1;
}

// Rule-based reference: sell surplus, buy deficit, otherwise idle.
TradeAction baseline_policy(double surplus_kw, double deficit_kw);

// How an action's label becomes an offered or requested quantity.
enum class QuantityRule {
  // The whole surplus (sell) or remaining deficit (buy).
  kNetPosition,
  // traded_power(), clamped to the surplus or remaining deficit.
  kLiteral,
};
QuantityRule parse_quantity_rule(const std::string& name);
const char* to_string(QuantityRule rule);

struct EnvOptions {
  ActionSpace action_space = ActionSpace::kUtRes;
  QuantityRule quantity_rule = QuantityRule::kNetPosition;
  SettleOptions settle;
  EvPolicy ev_policy;
  // PW^max defaults to this percentile of each cluster's unscheduled demand
  // over the episode.
  double pw_max_percentile = 75.0;
  // Keep EV charge and monthly billing across resets.
  bool carry_state = true;
};

struct EpisodeConfig {
  int day = 0;
  int horizon = kIntervalsPerDay;
  std::optional<double> pw_max_kw;  // overrides the percentile rule
};

struct ClusterStep {
  TradeAction action = TradeAction::kIdle;
  double demand_kw = 0.0;  // appliances plus EV charging
  double res_kw = 0.0;
  double ev_kw = 0.0;  // + charge, - discharge
  SourceMix mix;
  double p2p_buy_kwh = 0.0;   // received from clusters or bought from UT
  double p2p_sell_kwh = 0.0;  // delivered to clusters or sold to UT
  double curtailed_kwh = 0.0;
  double cost_usd = 0.0;
};

struct WorldStep {
  std::vector<ClusterStep> clusters;
  TradingRound round;
};

struct StepResult {
  MarketState state;
  std::vector<int> rewards;  // +1 / -1 per cluster
  bool done = false;
};

// One copy of the physical system: EVs, billing ledgers and a message bus.
class World {
 public:
  World(int clusters, const ScenarioConfig& config);

  WorldStep advance(long n_abs, int n_day, const DayData& day,
                    std::span<const TradeAction> actions,
                    std::span<const double> pw_max, const TariffSchedule& tariff,
                    const EnvOptions& options);

  void start_month();
  const std::vector<ClusterCostLedger>& ledgers() const { return ledgers_; }
  const std::vector<ElectricVehicle>& evs() const { return evs_; }
  double mean_household_kwh(int nanogrids_per_cluster) const;

 private:
  std::vector<ElectricVehicle> evs_;
  std::vector<ClusterCostLedger> ledgers_;
  bool has_ev_;
  MessageBus bus_;
};

// The trading MDP. A learner world follows the agents' actions while a
// shadow world follows baseline_policy() on the same exogenous inputs; the
// reward of cluster k is +1 when its shadow cost is strictly higher.
class Environment {
 public:
  Environment(std::shared_ptr<const Scenario> scenario, EnvOptions options);

  MarketState reset(const EpisodeConfig& config);
  StepResult step(std::span<const TradeAction> actions);

  // What baseline_policy() picks for every cluster at the current interval.
  std::vector<TradeAction> baseline_actions() const;

  int clusters() const { return scenario_->clusters(); }
  int state_size() const { return 2 * clusters() + 2; }
  ActionSpace action_space() const { return options_.action_space; }
  const EnvOptions& options() const { return options_; }
  const Scenario& scenario() const { return *scenario_; }

  int interval() const { return n_; }
  int horizon() const { return episode_.horizon; }
  bool done() const { return n_ >= episode_.horizon; }
  long absolute_interval() const;
  const std::vector<double>& pw_max() const { return pw_max_; }
  const MarketState& state() const { return state_; }

  const WorldStep& last_learner() const { return last_learner_; }
  const WorldStep& last_baseline() const { return last_baseline_; }
  const std::vector<int>& last_rewards() const { return last_rewards_; }
  const World& learner_world() const { return learner_; }
  const World& baseline_world() const { return baseline_; }

  // Costs accumulated since the last reset.
  const std::vector<double>& episode_cost() const { return episode_cost_; }
  const std::vector<double>& episode_baseline_cost() const {
    return episode_baseline_cost_;
  }

 private:
  MarketState observe() const;
  const DayData& day_at(int n) const;

  std::shared_ptr<const Scenario> scenario_;
  EnvOptions options_;
  EpisodeConfig episode_;
  World learner_;
  World baseline_;
  bool started_ = false;
  int n_ = 0;
  std::vector<double> pw_max_;
  MarketState state_;
  WorldStep last_learner_;
  WorldStep last_baseline_;
  std::vector<int> last_rewards_;
  std::vector<double> episode_cost_;
  std::vector<double> episode_baseline_cost_;
};

// Step-level trace: interval, cluster_id, demand_kw, res_kw, ev_kw, grid_kw,
// p2p_buy_kwh, p2p_sell_kwh, cost_usd, baseline_cost_usd, reward.
class StepTraceWriter {
 public:
  explicit StepTraceWriter(const std::filesystem::path& path);
  // Appends the most recent step of `env`.
  void append(const Environment& env);

 private:
  CsvWriter out_;
};

}  // namespace nanogrid

#endif  // NANOGRID_ENV_HPP_
