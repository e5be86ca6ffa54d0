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

#ifndef NANOGRID_SCENARIO_HPP_
#define NANOGRID_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nanogrid/assets.hpp"
#include "nanogrid/demand.hpp"
#include "nanogrid/tariff.hpp"

namespace nanogrid {

// Everything needed to synthesize the exogenous inputs of a run.
struct ScenarioConfig {
  int clusters = 10;
  int nanogrids_per_cluster = 3;
  int days = 37;  // training pool plus held-out evaluation days
  int start_day_of_year = 1;
  std::uint64_t seed = 1;

  // Cluster k (1-based) gets k times these capacities.
  double pv_kw_per_index = 1.0;
  double wind_kw_per_index = 0.8;
  PvParams pv;
  WindParams wind;
  std::optional<std::filesystem::path> generation_csv;

  double smp_mean = 0.09;
  double smp_amplitude = 0.02;
  double smp_peak_hour = 20.0;
  bool smp_monthly_average = false;
  std::optional<std::filesystem::path> smp_csv;

  std::string tariff_preset = "standard";
  CcecComponents ccec;

  std::vector<Appliance> catalog = default_appliance_catalog();
  double occupant_stay = 0.7;
  int d_max = 6;

  bool ev_enabled = true;
  ElectricVehicle ev;

  // Throws ConfigError on an invalid field.
  void validate() const;
};

// Exogenous per-cluster series for one simulated day.
struct DayData {
  int day = 0;
  std::vector<std::vector<double>> load_kw;         // after peak shaving
  std::vector<std::vector<double>> unscheduled_kw;  // every request on arrival
  std::vector<std::vector<double>> wind_kw;
  std::vector<std::vector<double>> pv_kw;

  double res_kw(int k, int n) const { return wind_kw[k][n] + pv_kw[k][n]; }
};

class Scenario {
 public:
  // Synthesizes every day up front. Each day draws from its own seed stream,
  // so day d is identical whatever other days exist.
  explicit Scenario(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  const TariffSchedule& tariff() const { return tariff_; }
  int clusters() const { return config_.clusters; }
  int days() const { return config_.days; }
  const DayData& day(int d) const;

 private:
  DayData synthesize_day(int d, const GenerationProfile* csv) const;

  ScenarioConfig config_;
  TariffSchedule tariff_;
  std::vector<DayData> days_;
};

}  // namespace nanogrid

#endif  // NANOGRID_SCENARIO_HPP_
