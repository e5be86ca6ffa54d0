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

#ifndef NANOGRID_ASSETS_HPP_
#define NANOGRID_ASSETS_HPP_

#include <filesystem>
#include <vector>

#include "nanogrid/rng.hpp"
#include "nanogrid/tariff.hpp"

namespace nanogrid {

struct PvParams {
  double sunrise_hour = 6.0;  // at the equinox
  double sunset_hour = 18.0;
  // Half of the summer/winter day-length swing, applied symmetrically around
  // solar noon.
  double seasonal_swing_hours = 1.0;
  // AR(1) cloud attenuation, clamped to [0, 1].
  double cloud_mean = 0.8;
  double cloud_persistence = 0.9;
  double cloud_sigma = 0.08;
};

// 144 ten-minute samples (kW) sampled at interval start times.
std::vector<double> synth_pv(double capacity_kw, int day_of_year,
                             const PvParams& params, Rng& cloud_rng);

struct WindParams {
  double weibull_shape = 2.0;
  double weibull_scale = 7.0;  // m/s
  double cut_in = 3.0;
  double rated = 12.0;
  double cut_out = 25.0;
  // Lag-one correlation of the Gaussian driver behind the speed series.
  double persistence = 0.95;
};

// Turbine power curve: 0 below cut-in, cubic ramp to rated, flat at capacity
// up to cut-out, 0 beyond.
double wind_power(double speed, double capacity_kw, const WindParams& params);

// 144 samples (kW). Speeds have Weibull marginals and AR(1) serial
// correlation (Gaussian copula).
std::vector<double> synth_wind(double capacity_kw, const WindParams& params,
                               Rng& rng);

// Per-cluster wind and PV series on the 10-minute grid.
class GenerationProfile {
 public:
  GenerationProfile() = default;
  GenerationProfile(int clusters, int intervals);

  int clusters() const { return clusters_; }
  int intervals() const { return intervals_; }

  double wind(int cluster, int n) const { return wind_[index(cluster, n)]; }
  double pv(int cluster, int n) const { return pv_[index(cluster, n)]; }
  double total(int cluster, int n) const {
    return wind(cluster, n) + pv(cluster, n);
  }
  void set(int cluster, int n, double wind_kw, double pv_kw);

  // Schema: interval, cluster_id, wind_kw, pv_kw (cluster_id is 1-based).
  static GenerationProfile from_csv(const std::filesystem::path& path);
  void to_csv(const std::filesystem::path& path) const;

 private:
  std::size_t index(int cluster, int n) const {
    return static_cast<std::size_t>(cluster) * intervals_ + n;
  }

  int clusters_ = 0;
  int intervals_ = 0;
  std::vector<double> wind_;
  std::vector<double> pv_;
};

struct ElectricVehicle {
  double capacity_kwh = 40.0;
  double soc = 0.5;
  double max_charge_kw = 7.0;
  double max_discharge_kw = 7.0;
  double efficiency = 0.95;  // one-way
  // Plugged in while available_from < t <= available_until (wraps midnight).
  double available_from_hour = 18.0;
  double available_until_hour = 8.0;
  double soc_min = 0.2;
  double soc_max = 0.9;

  bool available_at(double time_of_day) const;
  double stored_kwh() const { return soc * capacity_kwh; }
  // Throws ConfigError when a field is out of range.
  void validate() const;
};

struct EvPolicy {
  double surplus_threshold_kw = 0.5;
};

// Signed EV power (kW, + charge / - discharge) for one interval. Charges from
// RES surplus above the threshold; discharges into a deficit only in mid- or
// on-peak periods. Power is capped so the interval cannot cross a SOC bound.
double ev_decide(double res_surplus_kw, double deficit_kw, double time_of_day,
                 TouPeriod period, const ElectricVehicle& ev,
                 const EvPolicy& policy, double dt_hours);

// Applies `power_kw` for `dt_hours` and returns the new SOC. Throws
// SocBoundError when the result would leave [soc_min, soc_max] or when the
// power exceeds the applicable limit; the vehicle is left unchanged then.
double ev_apply(ElectricVehicle& ev, double power_kw, double dt_hours);

}  // namespace nanogrid

#endif  // NANOGRID_ASSETS_HPP_
