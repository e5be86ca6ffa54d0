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

#include "nanogrid/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nanogrid/clock.hpp"
#include "nanogrid/errors.hpp"

namespace nanogrid {
namespace {

// Remainders below this are rounding noise left by the pro-rata division.
constexpr double kMatchEps = 1e-12;

double sum_quantity(std::span<const TradeOrder> orders) {
  double s = 0.0;
  for (const auto& o : orders) s += o.quantity_kwh;
  return s;
}

}  // namespace

const char* to_string(Role role) {
  switch (role) {
    case Role::kIdle: return "idle";
    case Role::kProducer: return "producer";
    case Role::kConsumer: return "consumer";
  }
  return "?";
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::kInfoCollection: return "InfoCollection";
    case Stage::kRegistration: return "Registration";
    case Stage::kRouting: return "Routing";
    case Stage::kScheduling: return "Scheduling";
    case Stage::kTransmission: return "Transmission";
    case Stage::kSettlement: return "Settlement";
  }
  return "?";
}

const char* to_string(MessageType type) {
  switch (type) {
    case MessageType::kSnapshot: return "snapshot";
    case MessageType::kRegister: return "register";
    case MessageType::kRoute: return "route";
    case MessageType::kSchedule: return "schedule";
    case MessageType::kEnergy: return "energy";
    case MessageType::kPayment: return "payment";
  }
  return "?";
}

std::vector<TradeOrder> classify_roles(
    std::span<const std::pair<double, double>> supply_demand_kw,
    double dt_hours, double price) {
  std::vector<TradeOrder> orders;
  orders.reserve(supply_demand_kw.size());
  int id = 0;
  for (const auto& [supply, demand] : supply_demand_kw) {
    if (supply < 0.0 || demand < 0.0) {
      throw DomainError("classify_roles: supply and demand must be >= 0");
    }
    TradeOrder order{id++, Role::kIdle, 0.0, price};
    if (supply > demand) {
      order.role = Role::kProducer;
      order.quantity_kwh = (supply - demand) * dt_hours;
    } else if (demand > supply) {
      order.role = Role::kConsumer;
      order.quantity_kwh = (demand - supply) * dt_hours;
    }
    orders.push_back(order);
  }
  return orders;
}

Allocation allocate_proportional(std::span<const TradeOrder> producers,
                                 std::span<const TradeOrder> consumers) {
  for (const auto& p : producers) {
    if (p.role != Role::kProducer || !(p.quantity_kwh > 0.0)) {
      throw ContractError("allocate_proportional: bad producer order");
    }
  }
  for (const auto& c : consumers) {
    if (c.role != Role::kConsumer || !(c.quantity_kwh > 0.0)) {
      throw ContractError("allocate_proportional: bad consumer order");
    }
  }
  Allocation out;
  out.delivered.assign(producers.size(), 0.0);
  out.received.assign(consumers.size(), 0.0);
  if (producers.empty() || consumers.empty()) return out;

  const double supply = sum_quantity(producers);
  const double demand = sum_quantity(consumers);
  if (supply >= demand) {
    out.regime = 1;
    out.total_kwh = demand;
    for (std::size_t j = 0; j < consumers.size(); ++j) {
      out.received[j] = consumers[j].quantity_kwh;
    }
    for (std::size_t i = 0; i < producers.size(); ++i) {
      out.delivered[i] = demand * producers[i].quantity_kwh / supply;
    }
  } else {
    out.regime = 2;
    out.total_kwh = supply;
    for (std::size_t i = 0; i < producers.size(); ++i) {
      out.delivered[i] = producers[i].quantity_kwh;
    }
    for (std::size_t j = 0; j < consumers.size(); ++j) {
      out.received[j] = supply * consumers[j].quantity_kwh / demand;
    }
  }

  std::size_t i = 0;
  std::size_t j = 0;
  double left_p = out.delivered[0];
  double left_c = out.received[0];
  while (i < producers.size() && j < consumers.size()) {
    const double kwh = std::min(left_p, left_c);
    if (kwh > 0.0) {
      out.trades.push_back({producers[i].cluster, consumers[j].cluster, kwh});
    }
    left_p -= kwh;
    left_c -= kwh;
    if (left_p <= kMatchEps && ++i < producers.size()) left_p = out.delivered[i];
    if (left_c <= kMatchEps && ++j < consumers.size()) left_c = out.received[j];
  }
  return out;
}

void MessageBus::post_snapshot(const ClusterSnapshot& snapshot) {
  pending_.push_back(snapshot);
}

std::vector<ClusterSnapshot> MessageBus::take_snapshots(long n) {
  std::vector<ClusterSnapshot> taken;
  auto keep = pending_.begin();
  for (auto it = pending_.begin(); it != pending_.end(); ++it) {
    if (it->interval == n) {
      taken.push_back(*it);
    } else {
      *keep++ = *it;
    }
  }
  pending_.erase(keep, pending_.end());
  return taken;
}

TradingRound run_trading_round(int clusters, long n, MessageBus& bus,
                               double smp) {
  TradingRound round;
  round.interval = n;
  auto emit = [&](Stage stage, MessageType type, int from, int to, double kwh,
                  double usd) {
    Message m{stage, type, from, to, kwh, usd};
    round.messages.push_back(m);
    bus.post(m);
  };

  // 1. Information collection: gather what the clusters reported.
  round.stages.push_back(Stage::kInfoCollection);
  std::vector<ClusterSnapshot> snaps = bus.take_snapshots(n);
  std::vector<const ClusterSnapshot*> by_cluster(clusters, nullptr);
  for (const auto& s : snaps) {
    if (s.cluster >= 0 && s.cluster < clusters) by_cluster[s.cluster] = &s;
  }
  for (const auto& s : snaps) {
    emit(Stage::kInfoCollection, MessageType::kSnapshot, s.cluster, -1,
         s.offer_kwh - s.bid_kwh, 0.0);
  }

  // 2. Registration: every cluster becomes a producer, consumer or idle.
  round.stages.push_back(Stage::kRegistration);
  std::vector<TradeOrder> producers;
  std::vector<TradeOrder> consumers;
  for (int k = 0; k < clusters; ++k) {
    const ClusterSnapshot* s = by_cluster[k];
    if (s == nullptr) {
      throw ProtocolError(to_string(Stage::kRegistration), k,
                          "Registration: no snapshot from cluster " +
                              std::to_string(k + 1) + " for interval " +
                              std::to_string(n));
    }
    if (s->offer_kwh < 0.0 || s->bid_kwh < 0.0 ||
        (s->offer_kwh > 0.0 && s->bid_kwh > 0.0)) {
      throw ProtocolError(to_string(Stage::kRegistration), k,
                          "Registration: cluster " + std::to_string(k + 1) +
                              " posted an inconsistent offer/bid");
    }
    TradeOrder order{k, Role::kIdle, 0.0, smp};
    if (s->offer_kwh > 0.0) {
      order.role = Role::kProducer;
      order.quantity_kwh = s->offer_kwh;
      producers.push_back(order);
    } else if (s->bid_kwh > 0.0) {
      order.role = Role::kConsumer;
      order.quantity_kwh = s->bid_kwh;
      consumers.push_back(order);
    }
    round.orders.push_back(order);
    emit(Stage::kRegistration, MessageType::kRegister, k, -1,
         order.quantity_kwh, 0.0);
  }

  // 3. Routing: the cluster graph is complete, so every producer can reach
  // every consumer.
  round.stages.push_back(Stage::kRouting);
  for (const auto& p : producers) {
    for (const auto& c : consumers) {
      emit(Stage::kRouting, MessageType::kRoute, p.cluster, c.cluster, 0.0, 0.0);
    }
  }

  // 4. Scheduling: clear the market.
  round.stages.push_back(Stage::kScheduling);
  round.allocation = allocate_proportional(producers, consumers);
  for (const auto& t : round.allocation.trades) {
    emit(Stage::kScheduling, MessageType::kSchedule, t.producer, t.consumer,
         t.kwh, 0.0);
  }

  // 5. Transmission.
  round.stages.push_back(Stage::kTransmission);
  round.delivered_kwh.assign(clusters, 0.0);
  round.received_kwh.assign(clusters, 0.0);
  for (const auto& t : round.allocation.trades) {
    round.delivered_kwh[t.producer] += t.kwh;
    round.received_kwh[t.consumer] += t.kwh;
    emit(Stage::kTransmission, MessageType::kEnergy, t.producer, t.consumer,
         t.kwh, 0.0);
  }

  // 6. Settlement at the reference price.
  round.stages.push_back(Stage::kSettlement);
  round.cash_usd.assign(clusters, 0.0);
  for (const auto& t : round.allocation.trades) {
    const double usd = t.kwh * smp;
    round.cash_usd[t.producer] += usd;
    round.cash_usd[t.consumer] -= usd;
    emit(Stage::kSettlement, MessageType::kPayment, t.consumer, t.producer,
         t.kwh, usd);
  }
  return round;
}

std::vector<std::string> round_trace_header() {
  return {"interval", "stage", "cluster_id", "message_type", "kwh", "usd"};
}

void append_round_trace(CsvWriter& out, const TradingRound& round) {
  for (const auto& m : round.messages) {
    out.row(round.interval, to_string(m.stage), m.from + 1, to_string(m.type),
            m.kwh, m.usd);
  }
}

void ClusterCostLedger::record(const CostBreakdown& cost, double consumed_kwh) {
  if (consumed_kwh < 0.0) throw DomainError("ledger: negative consumption");
  last_ = cost;
  total_usd_ += cost.total();
  monthly_kwh_ += consumed_kwh;
}

double grid_multiplier(TradeAction action, bool literal) {
  if (!uses_utility(action)) return 0.0;
  const double label = static_cast<double>(static_cast<int>(action));
  return literal ? label : (label > 0.0 ? 1.0 : -1.0);
}

double res_multiplier(TradeAction action, bool literal) {
  (void)literal;  // the renewable labels are already +-1
  if (action == TradeAction::kBuyRes) return 1.0;
  if (action == TradeAction::kSellRes) return -1.0;
  return 0.0;
}

double settle_and_cost(ClusterCostLedger& ledger, long n, const SourceMix& mix,
                       const TradeFlows& flows, TradeAction action,
                       const TariffSchedule& tariff,
                       const SettleOptions& options) {
  if (flows.grid_p2p_kwh < 0.0 || flows.res_p2p_kwh < 0.0) {
    throw DomainError("settle_and_cost: traded energy must be >= 0");
  }
  const double dt = options.dt_hours;
  const double tod = interval_time_of_day(static_cast<int>(n % kIntervalsPerDay));
  const double household_kwh =
      ledger.monthly_kwh() / std::max(1, options.nanogrids_per_cluster);
  const double dr = tariff.effective_dr_rate(tod, household_kwh);
  const double smp = tariff.smp_at(interval_end_hour(n));

  CostBreakdown cost;
  cost.grid_load_usd = mix.grid_kw * dt * dr;
  cost.res_load_usd = mix.res_kw * dt * smp;
  cost.grid_p2p_usd = flows.grid_p2p_kwh *
                      grid_multiplier(action, options.literal_action_multiplier) *
                      dr;
  cost.res_p2p_usd = flows.res_p2p_kwh *
                     res_multiplier(action, options.literal_action_multiplier) *
                     smp;
  ledger.record(cost, mix.served() * dt);
  return cost.total();
}

}  // namespace nanogrid
