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

#ifndef NANOGRID_DEMAND_HPP_
#define NANOGRID_DEMAND_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nanogrid/rng.hpp"

namespace nanogrid {

inline constexpr int kRoomsPerNanogrid = 4;

enum class ApplianceCategory { kHvac, kEntertainment, kKitchen, kOther };

ApplianceCategory parse_category(const std::string& name);
const char* to_string(ApplianceCategory category);

// A household appliance. Rooms are numbered 1..4; HVAC units are present in
// every room and carry all four bits.
struct Appliance {
  std::string name;
  double power_kw = 0.0;
  std::uint8_t room_mask = 0;
  bool schedulable = false;
  ApplianceCategory category = ApplianceCategory::kOther;

  bool in_room(int room) const { return (room_mask >> (room - 1)) & 1U; }
};

// The twelve-appliance household inventory (rated powers from the survey
// table the simulator was calibrated against).
std::vector<Appliance> default_appliance_catalog();

// CSV: name, power_kw, room, schedulable[, category]. `room` is a single
// index, a ';'-separated list, or "all".
std::vector<Appliance> load_appliance_catalog(const std::filesystem::path& path);
void save_appliance_catalog(const std::filesystem::path& path,
                            std::span<const Appliance> catalog);

// Default per-interval activation probability of a category.
double default_usage_probability(ApplianceCategory category);

// Occupant movement between the four rooms plus per-appliance activation
// probabilities.
class OccupantChain {
 public:
  using Matrix = std::array<std::array<double, kRoomsPerNanogrid>,
                            kRoomsPerNanogrid>;

  // Throws ConfigError unless every row is a probability vector (sum within
  // 1e-12) and every usage probability lies in [0, 1].
  OccupantChain(const Matrix& transition, std::vector<double> usage_prob);

  // Stay with probability `stay`, move to each other room with (1-stay)/3.
  static Matrix uniform_move_matrix(double stay);
  static OccupantChain with_defaults(std::span<const Appliance> catalog,
                                     double stay = 0.7);

  const Matrix& transition() const { return transition_; }
  const std::vector<double>& usage_prob() const { return usage_prob_; }

 private:
  Matrix transition_;
  std::vector<double> usage_prob_;
};

struct LoadRequest {
  std::size_t appliance = 0;  // index into the catalog
  int interval = 0;
  int duration = 1;  // intervals, >= 1
  double power_kw = 0.0;
  bool schedulable = false;
};

// Samples the next room (1-based) from the current room's row.
int step_occupant(int room, const OccupantChain& chain, Rng& rng);

// Appliances located in `room` fire with their usage probability. One
// uniform draw is consumed per appliance whatever the room, so streams stay
// aligned across rooms; durations are uniform on [min_duration, max_duration].
std::vector<LoadRequest> draw_load_requests(int room, const OccupantChain& chain,
                                            std::span<const Appliance> appliances,
                                            int n, Rng& rng,
                                            int min_duration = 1,
                                            int max_duration = 6);

// Sum of non-negative nanogrid loads; throws DomainError on a negative entry.
double cluster_demand(std::span<const double> nanogrid_loads);

// One occupant walked over a horizon. An appliance is not requested again
// while an earlier request could still be pending or running (request time +
// deferral allowance + duration), so an appliance never overlaps itself.
struct OccupantTrace {
  std::vector<int> rooms;  // room at each interval
  std::vector<LoadRequest> requests;
};

OccupantTrace simulate_occupant(const OccupantChain& chain,
                                std::span<const Appliance> appliances,
                                int start_room, int horizon, int max_deferral,
                                Rng& rng);

}  // namespace nanogrid

#endif  // NANOGRID_DEMAND_HPP_
