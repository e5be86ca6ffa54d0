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

#include "nanogrid/demand.hpp"

#include <cmath>
#include <sstream>

#include "nanogrid/csv.hpp"
#include "nanogrid/errors.hpp"

namespace nanogrid {
namespace {

constexpr std::uint8_t kAllRooms = 0b1111;

std::uint8_t room_bit(int room) {
  return static_cast<std::uint8_t>(1U << (room - 1));
}

std::uint8_t parse_rooms(const std::string& cell, const std::string& origin) {
  if (cell == "all") return kAllRooms;
  std::uint8_t mask = 0;
  std::stringstream ss(cell);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const double v = parse_number(part, origin);
    if (v != std::floor(v) || v < 1 || v > kRoomsPerNanogrid) {
      throw ConfigError(origin + ": room must be in 1..4, got '" + part + "'");
    }
    mask |= room_bit(static_cast<int>(v));
  }
  if (mask == 0) throw ConfigError(origin + ": empty room field");
  return mask;
}

std::string format_rooms(std::uint8_t mask) {
  if (mask == kAllRooms) return "all";
  std::string out;
  for (int r = 1; r <= kRoomsPerNanogrid; ++r) {
    if (mask & room_bit(r)) {
      if (!out.empty()) out += ';';
      out += std::to_string(r);
    }
  }
  return out;
}

bool parse_bool(const std::string& cell, const std::string& origin) {
  if (cell == "1" || cell == "true" || cell == "yes") return true;
  if (cell == "0" || cell == "false" || cell == "no") return false;
  throw ConfigError(origin + ": expected boolean, got '" + cell + "'");
}

}  // namespace

ApplianceCategory parse_category(const std::string& name) {
  if (name == "hvac") return ApplianceCategory::kHvac;
  if (name == "entertainment") return ApplianceCategory::kEntertainment;
  if (name == "kitchen") return ApplianceCategory::kKitchen;
  if (name == "other") return ApplianceCategory::kOther;
  throw ConfigError("unknown appliance category '" + name + "'");
}

const char* to_string(ApplianceCategory category) {
  switch (category) {
    case ApplianceCategory::kHvac: return "hvac";
    case ApplianceCategory::kEntertainment: return "entertainment";
    case ApplianceCategory::kKitchen: return "kitchen";
    case ApplianceCategory::kOther: return "other";
  }
  return "other";
}

std::vector<Appliance> default_appliance_catalog() {
  using C = ApplianceCategory;
  return {
      {"air_conditioner", 1.21, kAllRooms, false, C::kHvac},
      {"electric_fan", 0.060, kAllRooms, false, C::kHvac},
      {"heater", 1.16, kAllRooms, false, C::kHvac},
      {"computer", 0.255, room_bit(4), false, C::kEntertainment},
      {"tv", 0.130, room_bit(2), false, C::kEntertainment},
      {"audio", 0.050, room_bit(1), true, C::kEntertainment},
      {"washing_machine", 0.242, room_bit(3), true, C::kOther},
      {"vacuum_cleaner", 1.07, room_bit(2), true, C::kOther},
      {"iron", 1.23, room_bit(2), true, C::kOther},
      {"microwave_oven", 1.04, room_bit(3), true, C::kKitchen},
      {"rice_cooker", 1.03, room_bit(3), true, C::kKitchen},
      {"hair_dryer", 1.00, room_bit(4), true, C::kOther},
  };
}

std::vector<Appliance> load_appliance_catalog(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::string origin = path.string();
  const auto name_col = table.column("name");
  const auto power_col = table.column("power_kw");
  const auto room_col = table.column("room");
  const auto sched_col = table.column("schedulable");
  std::ptrdiff_t cat_col = -1;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "category") cat_col = static_cast<std::ptrdiff_t>(i);
  }
  std::vector<Appliance> catalog;
  for (const auto& row : table.rows) {
    Appliance a;
    a.name = row[name_col];
    a.power_kw = parse_number(row[power_col], origin);
    if (!(a.power_kw > 0.0)) {
      throw ConfigError(origin + ": appliance '" + a.name +
                        "' must have power > 0");
    }
    a.room_mask = parse_rooms(row[room_col], origin);
    a.schedulable = parse_bool(row[sched_col], origin);
    if (cat_col >= 0) a.category = parse_category(row[cat_col]);
    catalog.push_back(std::move(a));
  }
  if (catalog.empty()) throw ConfigError(origin + ": empty appliance catalog");
  return catalog;
}

void save_appliance_catalog(const std::filesystem::path& path,
                            std::span<const Appliance> catalog) {
  CsvWriter out(path, {"name", "power_kw", "room", "schedulable", "category"});
  for (const auto& a : catalog) {
    out.row(a.name, a.power_kw, format_rooms(a.room_mask),
            a.schedulable ? "true" : "false", to_string(a.category));
  }
}

double default_usage_probability(ApplianceCategory category) {
  switch (category) {
    case ApplianceCategory::kHvac: return 0.15;
    case ApplianceCategory::kEntertainment: return 0.10;
    case ApplianceCategory::kKitchen: return 0.05;
    case ApplianceCategory::kOther: return 0.03;
  }
  return 0.0;
}

OccupantChain::OccupantChain(const Matrix& transition,
                             std::vector<double> usage_prob)
    : transition_(transition), usage_prob_(std::move(usage_prob)) {
  for (const auto& row : transition_) {
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw ConfigError("occupant chain: negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ConfigError("occupant chain: row does not sum to 1");
    }
  }
  for (double p : usage_prob_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("occupant chain: usage probability outside [0, 1]");
    }
  }
}

OccupantChain::Matrix OccupantChain::uniform_move_matrix(double stay) {
  Matrix m{};
  const double move = (1.0 - stay) / (kRoomsPerNanogrid - 1);
  for (int i = 0; i < kRoomsPerNanogrid; ++i) {
    for (int j = 0; j < kRoomsPerNanogrid; ++j) m[i][j] = i == j ? stay : move;
  }
  return m;
}

OccupantChain OccupantChain::with_defaults(std::span<const Appliance> catalog,
                                           double stay) {
  std::vector<double> usage;
  usage.reserve(catalog.size());
  for (const auto& a : catalog) {
    usage.push_back(default_usage_probability(a.category));
  }
  return OccupantChain(uniform_move_matrix(stay), std::move(usage));
}

int step_occupant(int room, const OccupantChain& chain, Rng& rng) {
  const auto& row = chain.transition()[room - 1];
  const double u = rng.uniform();
  double cum = 0.0;
  int last_reachable = room;
  for (int j = 0; j < kRoomsPerNanogrid; ++j) {
    if (row[j] <= 0.0) continue;
    cum += row[j];
    last_reachable = j + 1;
    if (u < cum) return j + 1;
  }
  // Row sums may fall a rounding step short of 1.
  return last_reachable;
}

std::vector<LoadRequest> draw_load_requests(int room, const OccupantChain& chain,
                                            std::span<const Appliance> appliances,
                                            int n, Rng& rng, int min_duration,
                                            int max_duration) {
  if (chain.usage_prob().size() != appliances.size()) {
    throw ContractError("draw_load_requests: usage probabilities do not match "
                        "the appliance list");
  }
  std::vector<LoadRequest> out;
  for (std::size_t i = 0; i < appliances.size(); ++i) {
    const double u = rng.uniform();
    const auto& a = appliances[i];
    if (!a.in_room(room) || !(u < chain.usage_prob()[i])) continue;
    const int duration = rng.uniform_int(min_duration, max_duration);
    out.push_back({i, n, duration, a.power_kw, a.schedulable});
  }
  return out;
}

double cluster_demand(std::span<const double> nanogrid_loads) {
  double total = 0.0;
  for (double load : nanogrid_loads) {
    if (load < 0.0) throw DomainError("cluster_demand: negative load");
    total += load;
  }
  return total;
}

OccupantTrace simulate_occupant(const OccupantChain& chain,
                                std::span<const Appliance> appliances,
                                int start_room, int horizon, int max_deferral,
                                Rng& rng) {
  OccupantTrace trace;
  trace.rooms.reserve(static_cast<std::size_t>(horizon));
  std::vector<int> busy_until(appliances.size(), 0);
  int room = start_room;
  for (int n = 0; n < horizon; ++n) {
    if (n > 0) room = step_occupant(room, chain, rng);
    trace.rooms.push_back(room);
    for (auto& req : draw_load_requests(room, chain, appliances, n, rng)) {
      if (n < busy_until[req.appliance]) continue;
      busy_until[req.appliance] =
          n + req.duration + (req.schedulable ? max_deferral : 0);
      trace.requests.push_back(req);
    }
  }
  return trace;
}

}  // namespace nanogrid
