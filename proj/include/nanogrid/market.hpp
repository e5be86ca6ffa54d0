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

#ifndef NANOGRID_MARKET_HPP_
#define NANOGRID_MARKET_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nanogrid/action.hpp"
#include "nanogrid/csv.hpp"
#include "nanogrid/scheduler.hpp"
#include "nanogrid/tariff.hpp"

namespace nanogrid {

enum class Role { kIdle, kProducer, kConsumer };
const char* to_string(Role role);

struct TradeOrder {
  int cluster = 0;  // 0-based
  Role role = Role::kIdle;
  double quantity_kwh = 0.0;
  double price = 0.0;  // $/kWh reference (SMP)
};

// Surplus -> producer, deficit -> consumer, balance -> idle. Quantities are
// energy over `dt_hours`.
std::vector<TradeOrder> classify_roles(
    std::span<const std::pair<double, double>> supply_demand_kw,
    double dt_hours, double price);

struct Trade {
  int producer = 0;  // cluster ids
  int consumer = 0;
  double kwh = 0.0;
};

struct Allocation {
  std::vector<double> delivered;  // per producer order
  std::vector<double> received;   // per consumer order
  std::vector<Trade> trades;
  double total_kwh = 0.0;
  // 1 when supply covers demand (consumers fully served), 2 otherwise, 0 when
  // a side is empty.
  int regime = 0;
};

// Pro-rata clearing on the long side; the short side is served in full.
// Trades pair producers and consumers greedily in order.
Allocation allocate_proportional(std::span<const TradeOrder> producers,
                                 std::span<const TradeOrder> consumers);

enum class Stage {
  kInfoCollection,
  kRegistration,
  kRouting,
  kScheduling,
  kTransmission,
  kSettlement,
};
const char* to_string(Stage stage);

enum class MessageType { kSnapshot, kRegister, kRoute, kSchedule, kEnergy, kPayment };
const char* to_string(MessageType type);

struct Message {
  Stage stage = Stage::kInfoCollection;
  MessageType type = MessageType::kSnapshot;
  int from = -1;  // cluster id, -1 for the market operator
  int to = -1;
  double kwh = 0.0;
  double usd = 0.0;
};

// What a cluster reports at the start of a round.
struct ClusterSnapshot {
  int cluster = 0;
  long interval = 0;
  double supply_kw = 0.0;
  double demand_kw = 0.0;
  double offer_kwh = 0.0;  // energy offered for sale
  double bid_kwh = 0.0;    // energy requested
};

// In-process stand-in for the router network. Clusters post snapshots; the
// round consumes them and appends its own traffic to the log.
class MessageBus {
 public:
  void post_snapshot(const ClusterSnapshot& snapshot);
  void post(const Message& message) { log_.push_back(message); }

  // Removes and returns the pending snapshots for interval n.
  std::vector<ClusterSnapshot> take_snapshots(long n);
  const std::vector<Message>& log() const { return log_; }
  void clear_log() { log_.clear(); }

 private:
  std::vector<ClusterSnapshot> pending_;
  std::vector<Message> log_;
};

struct TradingRound {
  long interval = 0;
  std::vector<Stage> stages;
  std::vector<TradeOrder> orders;  // one per cluster, by id
  Allocation allocation;
  std::vector<double> delivered_kwh;  // per cluster
  std::vector<double> received_kwh;
  std::vector<double> cash_usd;  // + received, - paid
  std::vector<Message> messages;
};

// Runs the six-stage procedure for clusters 0..clusters-1 at interval n and
// settles at `smp`. Throws ProtocolError("Registration", id) when a cluster
// did not post a snapshot.
TradingRound run_trading_round(int clusters, long n, MessageBus& bus,
                               double smp);

// Schema: interval, stage, cluster_id, message_type, kwh, usd.
std::vector<std::string> round_trace_header();
void append_round_trace(CsvWriter& out, const TradingRound& round);

struct CostBreakdown {
  double grid_load_usd = 0.0;
  double res_load_usd = 0.0;
  double grid_p2p_usd = 0.0;
  double res_p2p_usd = 0.0;

  double total() const {
    return grid_load_usd + res_load_usd + grid_p2p_usd + res_p2p_usd;
  }
};

// Per-cluster billing state.
class ClusterCostLedger {
 public:
  double monthly_kwh() const { return monthly_kwh_; }
  double total_usd() const { return total_usd_; }
  const CostBreakdown& last() const { return last_; }

  void start_month() { monthly_kwh_ = 0.0; }
  void record(const CostBreakdown& cost, double consumed_kwh);

 private:
  double monthly_kwh_ = 0.0;
  double total_usd_ = 0.0;
  CostBreakdown last_;
};

// Traded energy magnitudes for one cluster and interval.
struct TradeFlows {
  double grid_p2p_kwh = 0.0;  // with the utility
  double res_p2p_kwh = 0.0;   // with other clusters
};

struct SettleOptions {
  // Use the raw labels (+-2 on the utility channel) as cost multipliers
  // instead of their signs.
  bool literal_action_multiplier = false;
  // The progressive tier is read at the per-household share of the
  // cluster's monthly consumption.
  int nanogrids_per_cluster = 3;
  double dt_hours = 1.0 / 6.0;
};

// Multiplier applied to the utility and renewable trade terms for `action`.
double grid_multiplier(TradeAction action, bool literal);
double res_multiplier(TradeAction action, bool literal);

// Interval cost of one cluster:
//   grid_load*DR + res_load*SMP + grid_p2p*A_grid*DR + res_p2p*A_res*SMP
// with DR read at the ledger's current monthly consumption. Adds the served
// demand to the monthly total afterwards.
double settle_and_cost(ClusterCostLedger& ledger, long n, const SourceMix& mix,
                       const TradeFlows& flows, TradeAction action,
                       const TariffSchedule& tariff,
                       const SettleOptions& options = {});

}  // namespace nanogrid

#endif  // NANOGRID_MARKET_HPP_
