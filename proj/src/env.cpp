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

#include "nanogrid/env.hpp"

#include <algorithm>
#include <cmath>

#include "nanogrid/clock.hpp"
#include "nanogrid/errors.hpp"

namespace nanogrid {
namespace {

// Linear interpolation between closest ranks.
double percentile(std::vector<double> values, double pct) {
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

constexpr long kIntervalsPerMonth = static_cast<long>(kIntervalsPerDay) * kDaysPerMonth;

}  // namespace

std::vector<double> MarketState::flatten() const {
  std::vector<double> v;
  v.reserve(size());
  v.insert(v.end(), demand_kw.begin(), demand_kw.end());
  v.insert(v.end(), supply_kw.begin(), supply_kw.end());
  v.push_back(dr);
  v.push_back(smp);
  return v;
}

double traded_power(TradeAction action, double pw_cluster_kw, double pw_res_kw,
                    double pw_max_kw) {
  if (pw_cluster_kw < 0.0 || pw_res_kw < 0.0 || pw_max_kw < 0.0) {
    throw DomainError("traded_power: inputs must be >= 0");
  }
  if (is_buy(action)) {
    return std::max(0.0, (pw_cluster_kw - pw_res_kw) - pw_max_kw);
  }
  if (is_sell(action)) {
    return std::max(0.0, pw_max_kw - (pw_cluster_kw + pw_res_kw));
  }
  return 0.0;
}

TradeAction baseline_policy(double surplus_kw, double deficit_kw) {
  if (surplus_kw > 0.0 && deficit_kw > 0.0) {
    throw ContractError("baseline_policy: surplus and deficit both positive");
  }
  if (surplus_kw > 0.0) return TradeAction::kSellRes;
  if (deficit_kw > 0.0) return TradeAction::kBuyRes;
  return TradeAction::kIdle;
}

QuantityRule parse_quantity_rule(const std::string& name) {
  if (name == "net_position") return QuantityRule::kNetPosition;
  if (name == "literal") return QuantityRule::kLiteral;
  throw ConfigError("unknown quantity rule '" + name +
                    "' (expected net_position|literal)");
}

const char* to_string(QuantityRule rule) {
  return rule == QuantityRule::kNetPosition ? "net_position" : "literal";
}

World::World(int clusters, const ScenarioConfig& config)
    : evs_(clusters, config.ev),
      ledgers_(clusters),
      has_ev_(config.ev_enabled) {}

void World::start_month() {
  for (auto& l : ledgers_) l.start_month();
}

double World::mean_household_kwh(int nanogrids_per_cluster) const {
  double total = 0.0;
  for (const auto& l : ledgers_) total += l.monthly_kwh();
  return total / (static_cast<double>(ledgers_.size()) *
                  std::max(1, nanogrids_per_cluster));
}

WorldStep World::advance(long n_abs, int n_day, const DayData& day,
                         std::span<const TradeAction> actions,
                         std::span<const double> pw_max,
                         const TariffSchedule& tariff,
                         const EnvOptions& options) {
  const int K = static_cast<int>(evs_.size());
  const double dt = options.settle.dt_hours;
  const double tod = interval_time_of_day(n_day);
  const TouPeriod period = tariff.tou_period(tod);
  const double smp = tariff.smp_at(interval_end_hour(n_abs));

  WorldStep out;
  out.clusters.resize(K);
  std::vector<double> ev_kw(K, 0.0);
  std::vector<double> ut_buy_kw(K, 0.0);
  std::vector<double> ut_sell_kw(K, 0.0);

  for (int k = 0; k < K; ++k) {
    const TradeAction a = actions[k];
    const double load = day.load_kw[k][n_day];
    const double res = day.res_kw(k, n_day);
    const double surplus = std::max(0.0, res - load);
    const double deficit = std::max(0.0, load - res);

    // A deficit is first met by the EV; only the remainder can be bought.
    if (has_ev_ && deficit > 0.0) {
      ev_kw[k] = ev_decide(0.0, deficit, tod, period, evs_[k],
                           options.ev_policy, dt);
    }
    const double open_deficit = std::max(0.0, deficit + ev_kw[k]);

    double quantity_kw = 0.0;
    if (is_sell(a)) {
      quantity_kw = options.quantity_rule == QuantityRule::kNetPosition
                        ? surplus
                        : std::min(traded_power(a, load, res, pw_max[k]), surplus);
    } else if (is_buy(a)) {
      quantity_kw =
          options.quantity_rule == QuantityRule::kNetPosition
              ? open_deficit
              : std::min(traded_power(a, load, res, pw_max[k]), open_deficit);
    }

    // Surplus not committed to a sale can charge the EV.
    if (has_ev_ && surplus > 0.0) {
      const double left = is_sell(a) ? surplus - quantity_kw : surplus;
      ev_kw[k] = ev_decide(left, 0.0, tod, period, evs_[k], options.ev_policy, dt);
    }

    ClusterSnapshot snap{k, n_abs, res, load, 0.0, 0.0};
    if (uses_utility(a)) {
      (is_buy(a) ? ut_buy_kw[k] : ut_sell_kw[k]) = quantity_kw;
    } else if (is_sell(a)) {
      snap.offer_kwh = quantity_kw * dt;
    } else if (is_buy(a)) {
      snap.bid_kwh = quantity_kw * dt;
    }
    bus_.post_snapshot(snap);

    ClusterStep& c = out.clusters[k];
    c.action = a;
    c.res_kw = res;
    c.ev_kw = ev_kw[k];
    c.demand_kw = load + std::max(0.0, ev_kw[k]);
  }

  bus_.clear_log();
  out.round = run_trading_round(K, n_abs, bus_, smp);

  for (int k = 0; k < K; ++k) {
    ClusterStep& c = out.clusters[k];
    const double discharge = std::max(0.0, -ev_kw[k]);
    const double bought_kw = out.round.received_kwh[k] / dt + ut_buy_kw[k];
    c.mix = dispatch_sources(c.demand_kw, c.res_kw, discharge, bought_kw);
    c.p2p_buy_kwh = out.round.received_kwh[k] + ut_buy_kw[k] * dt;
    c.p2p_sell_kwh = out.round.delivered_kwh[k] + ut_sell_kw[k] * dt;
    c.curtailed_kwh = std::max(0.0, c.mix.surplus_kw * dt - c.p2p_sell_kwh);
    if (has_ev_) ev_apply(evs_[k], ev_kw[k], dt);

    TradeFlows flows;
    if (uses_utility(c.action)) {
      flows.grid_p2p_kwh = (ut_buy_kw[k] + ut_sell_kw[k]) * dt;
    } else {
      flows.res_p2p_kwh = out.round.received_kwh[k] + out.round.delivered_kwh[k];
    }
    c.cost_usd = settle_and_cost(ledgers_[k], n_abs, c.mix, flows, c.action,
                                 tariff, options.settle);
  }
  return out;
}

Environment::Environment(std::shared_ptr<const Scenario> scenario,
                         EnvOptions options)
    : scenario_(std::move(scenario)),
      options_(std::move(options)),
      learner_(scenario_->clusters(), scenario_->config()),
      baseline_(scenario_->clusters(), scenario_->config()) {
  options_.settle.nanogrids_per_cluster = scenario_->config().nanogrids_per_cluster;
  if (!(options_.pw_max_percentile >= 0.0 && options_.pw_max_percentile <= 100.0)) {
    throw ConfigError("pw_max percentile must be in [0, 100]");
  }
}

long Environment::absolute_interval() const {
  return static_cast<long>(episode_.day) * kIntervalsPerDay + n_;
}

const DayData& Environment::day_at(int n) const {
  return scenario_->day(episode_.day + n / kIntervalsPerDay);
}

MarketState Environment::reset(const EpisodeConfig& config) {
  if (config.horizon < 1) throw ConfigError("episode horizon must be >= 1");
  if (config.pw_max_kw && !(*config.pw_max_kw > 0.0)) {
    throw ConfigError("PW^max must be > 0");
  }
  const long last = static_cast<long>(config.day) * kIntervalsPerDay + config.horizon;
  if (config.day < 0 || last > static_cast<long>(scenario_->days()) * kIntervalsPerDay) {
    throw ConfigError("episode (day " + std::to_string(config.day) + ", " +
                      std::to_string(config.horizon) +
                      " intervals) runs past the scenario's " +
                      std::to_string(scenario_->days()) + " days");
  }
  episode_ = config;
  n_ = 0;
  if (!started_ || !options_.carry_state) {
    learner_ = World(clusters(), scenario_->config());
    baseline_ = World(clusters(), scenario_->config());
    started_ = true;
  }

  const int K = clusters();
  pw_max_.assign(K, 0.0);
  for (int k = 0; k < K; ++k) {
    if (config.pw_max_kw) {
      pw_max_[k] = *config.pw_max_kw;
      continue;
    }
    std::vector<double> profile;
    profile.reserve(config.horizon);
    for (int n = 0; n < config.horizon; ++n) {
      profile.push_back(day_at(n).unscheduled_kw[k][n % kIntervalsPerDay]);
    }
    pw_max_[k] = std::max(1e-9, percentile(std::move(profile),
                                           options_.pw_max_percentile));
  }
  episode_cost_.assign(K, 0.0);
  episode_baseline_cost_.assign(K, 0.0);
  last_rewards_.clear();
  state_ = observe();
  return state_;
}

std::vector<TradeAction> Environment::baseline_actions() const {
  const int nd = n_ % kIntervalsPerDay;
  const DayData& day = day_at(std::min(n_, episode_.horizon - 1));
  std::vector<TradeAction> out(clusters());
  for (int k = 0; k < clusters(); ++k) {
    const double load = day.load_kw[k][nd];
    const double res = day.res_kw(k, nd);
    out[k] = baseline_policy(std::max(0.0, res - load), std::max(0.0, load - res));
  }
  return out;
}

StepResult Environment::step(std::span<const TradeAction> actions) {
  if (!started_) throw ContractError("step() before reset()");
  if (done()) throw ContractError("step() on a finished episode");
  const int K = clusters();
  if (static_cast<int>(actions.size()) != K) {
    throw ContractError("step() got " + std::to_string(actions.size()) +
                        " actions for " + std::to_string(K) + " clusters");
  }
  for (TradeAction a : actions) {
    if (!action_allowed(options_.action_space, a)) {
      throw ContractError(std::string("action ") + to_string(a) +
                          " not in the " + to_string(options_.action_space) +
                          " space");
    }
  }

  const long n_abs = absolute_interval();
  if (n_abs % kIntervalsPerMonth == 0) {
    learner_.start_month();
    baseline_.start_month();
  }
  const int nd = n_ % kIntervalsPerDay;
  const DayData& day = day_at(n_);
  const std::vector<TradeAction> reference = baseline_actions();

  last_learner_ = learner_.advance(n_abs, nd, day, actions, pw_max_,
                                   scenario_->tariff(), options_);
  last_baseline_ = baseline_.advance(n_abs, nd, day, reference, pw_max_,
                                     scenario_->tariff(), options_);

  StepResult result;
  result.rewards.resize(K);
  for (int k = 0; k < K; ++k) {
    const double proposed = last_learner_.clusters[k].cost_usd;
    const double base = last_baseline_.clusters[k].cost_usd;
    result.rewards[k] = interval_reward(base, proposed);
    episode_cost_[k] += proposed;
    episode_baseline_cost_[k] += base;
  }
  last_rewards_ = result.rewards;
  ++n_;
  result.done = done();
  state_ = observe();
  result.state = state_;
  return result;
}

MarketState Environment::observe() const {
  const int K = clusters();
  const int n = std::min(n_, episode_.horizon - 1);
  const int nd = n % kIntervalsPerDay;
  const DayData& day = day_at(n);
  const TariffSchedule& tariff = scenario_->tariff();
  MarketState s;
  s.demand_kw.resize(K);
  s.supply_kw.resize(K);
  for (int k = 0; k < K; ++k) {
    s.demand_kw[k] = day.load_kw[k][nd];
    s.supply_kw[k] = day.res_kw(k, nd);
  }
  const double household =
      learner_.mean_household_kwh(scenario_->config().nanogrids_per_cluster);
  s.dr = tariff.effective_dr_rate(interval_time_of_day(nd), household);
  s.smp = tariff.smp_at(interval_end_hour(static_cast<long>(episode_.day) *
                                              kIntervalsPerDay + n));
  return s;
}

StepTraceWriter::StepTraceWriter(const std::filesystem::path& path)
    : out_(path, {"interval", "cluster_id", "demand_kw", "res_kw", "ev_kw",
                  "grid_kw", "p2p_buy_kwh", "p2p_sell_kwh", "cost_usd",
                  "baseline_cost_usd", "reward"}) {}

void StepTraceWriter::append(const Environment& env) {
  const WorldStep& l = env.last_learner();
  const WorldStep& b = env.last_baseline();
  const long n_abs = env.absolute_interval() - 1;
  for (int k = 0; k < env.clusters(); ++k) {
    const ClusterStep& c = l.clusters[k];
    out_.row(n_abs, k + 1, c.demand_kw, c.res_kw, c.ev_kw, c.mix.grid_kw,
             c.p2p_buy_kwh, c.p2p_sell_kwh, c.cost_usd, b.clusters[k].cost_usd,
             env.last_rewards()[k]);
  }
}

}  // namespace nanogrid
