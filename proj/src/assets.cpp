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

#include "nanogrid/assets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nanogrid/clock.hpp"
#include "nanogrid/csv.hpp"
#include "nanogrid/errors.hpp"

namespace nanogrid {
namespace {

constexpr double kSocTolerance = 1e-12;

bool in_window(double t, double from, double until) {
  double offset = std::fmod(t - from, 24.0);
  if (offset < 0.0) offset += 24.0;
  double len = std::fmod(until - from, 24.0);
  if (len < 0.0) len += 24.0;
  if (len == 0.0) len = 24.0;
  return offset > 0.0 && offset <= len;
}

double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace

std::vector<double> synth_pv(double capacity_kw, int day_of_year,
                             const PvParams& params, Rng& cloud_rng) {
  std::vector<double> out(kIntervalsPerDay, 0.0);
  const double noon = 0.5 * (params.sunrise_hour + params.sunset_hour);
  const double seasonal =
      params.seasonal_swing_hours *
      std::sin(2.0 * std::numbers::pi * (day_of_year - 80) / 365.0);
  const double half_day =
      0.5 * (params.sunset_hour - params.sunrise_hour) + seasonal;
  const double rise = noon - half_day;
  const double set = noon + half_day;

  double cloud = params.cloud_mean;
  for (int n = 0; n < kIntervalsPerDay; ++n) {
    const double shock = cloud_rng.normal();
    cloud = params.cloud_mean + params.cloud_persistence * (cloud - params.cloud_mean) +
            params.cloud_sigma * shock;
    cloud = std::clamp(cloud, 0.0, 1.0);
    const double t = interval_start_hour_of_day(n);
    if (capacity_kw <= 0.0 || t <= rise || t >= set) continue;
    const double shape = std::sin(std::numbers::pi * (t - rise) / (set - rise));
    out[n] = capacity_kw * shape * cloud;
  }
  return out;
}

double wind_power(double speed, double capacity_kw, const WindParams& p) {
  if (speed < p.cut_in || speed > p.cut_out) return 0.0;
  if (speed >= p.rated) return capacity_kw;
  const double lo = p.cut_in * p.cut_in * p.cut_in;
  const double hi = p.rated * p.rated * p.rated;
  return capacity_kw * (speed * speed * speed - lo) / (hi - lo);
}

std::vector<double> synth_wind(double capacity_kw, const WindParams& p,
                               Rng& rng) {
  std::vector<double> out(kIntervalsPerDay, 0.0);
  const double innovation = std::sqrt(1.0 - p.persistence * p.persistence);
  double z = rng.normal();
  for (int n = 0; n < kIntervalsPerDay; ++n) {
    if (n > 0) z = p.persistence * z + innovation * rng.normal();
    // Clamp keeps the inverse CDF finite in the far tails.
    const double u = std::clamp(standard_normal_cdf(z), 1e-12, 1.0 - 1e-12);
    const double speed =
        p.weibull_scale * std::pow(-std::log1p(-u), 1.0 / p.weibull_shape);
    out[n] = wind_power(speed, capacity_kw, p);
  }
  return out;
}

GenerationProfile::GenerationProfile(int clusters, int intervals)
    : clusters_(clusters),
      intervals_(intervals),
      wind_(static_cast<std::size_t>(clusters) * intervals, 0.0),
      pv_(static_cast<std::size_t>(clusters) * intervals, 0.0) {}

void GenerationProfile::set(int cluster, int n, double wind_kw, double pv_kw) {
  if (wind_kw < 0.0 || pv_kw < 0.0) {
    throw DomainError("generation samples must be >= 0");
  }
  wind_[index(cluster, n)] = wind_kw;
  pv_[index(cluster, n)] = pv_kw;
}

GenerationProfile GenerationProfile::from_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::string origin = path.string();
  const auto n_col = table.column("interval");
  const auto c_col = table.column("cluster_id");
  const auto w_col = table.column("wind_kw");
  const auto p_col = table.column("pv_kw");
  int max_cluster = 0;
  int max_interval = -1;
  for (const auto& row : table.rows) {
    max_cluster = std::max(max_cluster,
                           static_cast<int>(parse_number(row[c_col], origin)));
    max_interval = std::max(max_interval,
                            static_cast<int>(parse_number(row[n_col], origin)));
  }
  if (max_cluster < 1 || max_interval < 0) {
    throw ConfigError(origin + ": empty generation profile");
  }
  GenerationProfile profile(max_cluster, max_interval + 1);
  std::vector<int> seen(static_cast<std::size_t>(max_cluster), 0);
  for (const auto& row : table.rows) {
    const int cluster = static_cast<int>(parse_number(row[c_col], origin));
    const int n = static_cast<int>(parse_number(row[n_col], origin));
    const double w = parse_number(row[w_col], origin);
    const double pv = parse_number(row[p_col], origin);
    if (w < 0.0 || pv < 0.0) {
      throw ConfigError(origin + ": negative generation sample");
    }
    profile.set(cluster - 1, n, w, pv);
    ++seen[cluster - 1];
  }
  for (int c = 0; c < max_cluster; ++c) {
    if (seen[c] != max_interval + 1) {
      throw ConfigError(origin + ": cluster " + std::to_string(c + 1) +
                        " has " + std::to_string(seen[c]) +
                        " samples, expected " + std::to_string(max_interval + 1));
    }
  }
  return profile;
}

void GenerationProfile::to_csv(const std::filesystem::path& path) const {
  CsvWriter out(path, {"interval", "cluster_id", "wind_kw", "pv_kw"});
  for (int n = 0; n < intervals_; ++n) {
    for (int c = 0; c < clusters_; ++c) out.row(n, c + 1, wind(c, n), pv(c, n));
  }
}

bool ElectricVehicle::available_at(double time_of_day) const {
  return in_window(time_of_day, available_from_hour, available_until_hour);
}

void ElectricVehicle::validate() const {
  if (!(capacity_kwh > 0.0)) throw ConfigError("ev: capacity must be > 0");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw ConfigError("ev: efficiency must be in (0, 1]");
  }
  if (!(0.0 <= soc_min && soc_min <= soc_max && soc_max <= 1.0)) {
    throw ConfigError("ev: need 0 <= soc_min <= soc_max <= 1");
  }
  if (soc < soc_min - kSocTolerance || soc > soc_max + kSocTolerance) {
    throw ConfigError("ev: initial soc outside [soc_min, soc_max]");
  }
  if (max_charge_kw < 0.0 || max_discharge_kw < 0.0) {
    throw ConfigError("ev: power limits must be >= 0");
  }
}

double ev_decide(double res_surplus_kw, double deficit_kw, double time_of_day,
                 TouPeriod period, const ElectricVehicle& ev,
                 const EvPolicy& policy, double dt_hours) {
  if (!ev.available_at(time_of_day)) return 0.0;
  if (res_surplus_kw > policy.surplus_threshold_kw && ev.soc < ev.soc_max) {
    const double headroom_kw =
        (ev.soc_max - ev.soc) * ev.capacity_kwh / (dt_hours * ev.efficiency);
    return std::min({ev.max_charge_kw, res_surplus_kw, headroom_kw});
  }
  if (deficit_kw > 0.0 && ev.soc > ev.soc_min &&
      period != TouPeriod::kOffPeak) {
    const double available_kw =
        (ev.soc - ev.soc_min) * ev.capacity_kwh * ev.efficiency / dt_hours;
    return -std::min({ev.max_discharge_kw, deficit_kw, available_kw});
  }
  return 0.0;
}

double ev_apply(ElectricVehicle& ev, double power_kw, double dt_hours) {
  if (power_kw > ev.max_charge_kw + kSocTolerance ||
      -power_kw > ev.max_discharge_kw + kSocTolerance) {
    throw SocBoundError("ev_apply: power exceeds the charger limit");
  }
  const double delta_kwh = power_kw >= 0.0
                               ? power_kw * dt_hours * ev.efficiency
                               : power_kw * dt_hours / ev.efficiency;
  const double next = (ev.stored_kwh() + delta_kwh) / ev.capacity_kwh;
  if (next < ev.soc_min - kSocTolerance || next > ev.soc_max + kSocTolerance) {
    throw SocBoundError("ev_apply: state of charge would leave [" +
                        format_number(ev.soc_min) + ", " +
                        format_number(ev.soc_max) + "]");
  }
  ev.soc = std::clamp(next, ev.soc_min, ev.soc_max);
  return ev.soc;
}

}  // namespace nanogrid
