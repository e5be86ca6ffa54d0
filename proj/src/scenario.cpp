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

#include "nanogrid/scenario.hpp"

#include "nanogrid/clock.hpp"
#include "nanogrid/csv.hpp"
#include "nanogrid/errors.hpp"
#include "nanogrid/scheduler.hpp"

namespace nanogrid {
namespace {

// Seed streams; kept distinct so adding one source never shifts another.
constexpr std::uint64_t kStreamOccupant = 1;
constexpr std::uint64_t kStreamPv = 2;
constexpr std::uint64_t kStreamWind = 3;

SmpSeries build_smp(const ScenarioConfig& c) {
  SmpSeries smp = c.smp_csv ? SmpSeries::from_csv(*c.smp_csv)
                            : SmpSeries::synthetic_diurnal(
                                  c.days, c.smp_mean, c.smp_amplitude,
                                  c.smp_peak_hour);
  return c.smp_monthly_average ? smp.monthly_average() : smp;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (clusters < 1) throw ConfigError("scenario.clusters must be >= 1");
  if (nanogrids_per_cluster < 1) {
    throw ConfigError("scenario.nanogrids_per_cluster must be >= 1");
  }
  if (days < 1) throw ConfigError("scenario.days must be >= 1");
  if (pv_kw_per_index < 0.0 || wind_kw_per_index < 0.0) {
    throw ConfigError("scenario: generation capacities must be >= 0");
  }
  if (!(wind.weibull_shape > 0.0 && wind.weibull_scale > 0.0)) {
    throw ConfigError("scenario.wind: weibull shape and scale must be > 0");
  }
  if (!(pv.sunset_hour > pv.sunrise_hour)) {
    throw ConfigError("scenario.pv: sunset must follow sunrise");
  }
  if (d_max < 0) throw ConfigError("scenario.d_max must be >= 0");
  if (catalog.empty()) throw ConfigError("scenario: empty appliance catalog");
  if (occupant_stay < 0.0 || occupant_stay > 1.0) {
    throw ConfigError("scenario.occupant_stay must be in [0, 1]");
  }
  if (ev_enabled) ev.validate();
}

Scenario::Scenario(ScenarioConfig config)
    : config_(std::move(config)),
      tariff_(TariffSchedule::bands_for_preset(config_.tariff_preset),
              TariffSchedule::standard_tiers(), config_.ccec,
              build_smp(config_)) {
  config_.validate();
  const double needed_hours = config_.days * 24.0;
  if (tariff_.smp().samples().back().first < needed_hours - 1.0 &&
      config_.smp_csv) {
    throw ConfigError("SMP series covers " +
                      format_number(tariff_.smp().samples().back().first) +
                      " h, scenario needs " + format_number(needed_hours));
  }
  std::optional<GenerationProfile> csv;
  if (config_.generation_csv) {
    csv = GenerationProfile::from_csv(*config_.generation_csv);
    if (csv->clusters() != config_.clusters) {
      throw ConfigError("generation profile has " +
                        std::to_string(csv->clusters()) + " clusters, scenario " +
                        std::to_string(config_.clusters));
    }
    if (csv->intervals() < config_.days * kIntervalsPerDay) {
      throw ConfigError("generation profile has " +
                        std::to_string(csv->intervals()) +
                        " intervals, scenario needs " +
                        std::to_string(config_.days * kIntervalsPerDay));
    }
  }
  days_.reserve(config_.days);
  for (int d = 0; d < config_.days; ++d) {
    days_.push_back(synthesize_day(d, csv ? &*csv : nullptr));
  }
}

const DayData& Scenario::day(int d) const {
  if (d < 0 || d >= static_cast<int>(days_.size())) {
    throw ContractError("scenario day " + std::to_string(d) + " out of range");
  }
  return days_[d];
}

DayData Scenario::synthesize_day(int d, const GenerationProfile* csv) const {
  const int K = config_.clusters;
  const int H = kIntervalsPerDay;
  DayData out;
  out.day = d;
  out.load_kw.assign(K, std::vector<double>(H, 0.0));
  out.unscheduled_kw.assign(K, std::vector<double>(H, 0.0));
  out.wind_kw.assign(K, std::vector<double>(H, 0.0));
  out.pv_kw.assign(K, std::vector<double>(H, 0.0));

  const OccupantChain chain =
      OccupantChain::with_defaults(config_.catalog, config_.occupant_stay);
  const std::uint64_t day_seed = Rng::splitmix(config_.seed ^ (0x9e37ULL * (d + 1)));
  const std::vector<double> background(H, 0.0);

  for (int k = 0; k < K; ++k) {
    std::vector<LoadRequest> requests;
    for (int g = 0; g < config_.nanogrids_per_cluster; ++g) {
      const auto home = static_cast<std::uint64_t>(k * 64 + g);
      Rng rng = Rng::derive(day_seed, kStreamOccupant * 1000003ULL + home);
      OccupantTrace trace = simulate_occupant(chain, config_.catalog, 1, H,
                                              config_.d_max, rng);
      requests.insert(requests.end(), trace.requests.begin(),
                      trace.requests.end());
    }
    for (const auto& r : requests) {
      for (int m = r.interval; m < std::min(H, r.interval + r.duration); ++m) {
        out.unscheduled_kw[k][m] += r.power_kw;
      }
    }
    out.load_kw[k] = schedule_flexible(requests, background, config_.d_max).load_kw;

    if (csv != nullptr) {
      for (int n = 0; n < H; ++n) {
        out.wind_kw[k][n] = csv->wind(k, d * H + n);
        out.pv_kw[k][n] = csv->pv(k, d * H + n);
      }
    } else {
      const double index = k + 1;
      Rng pv_rng = Rng::derive(day_seed, kStreamPv * 1000003ULL + k);
      Rng wind_rng = Rng::derive(day_seed, kStreamWind * 1000003ULL + k);
      out.pv_kw[k] = synth_pv(config_.pv_kw_per_index * index,
                              config_.start_day_of_year + d, config_.pv, pv_rng);
      out.wind_kw[k] = synth_wind(config_.wind_kw_per_index * index,
                                  config_.wind, wind_rng);
    }
  }
  return out;
}

}  // namespace nanogrid
