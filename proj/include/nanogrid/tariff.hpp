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

#ifndef NANOGRID_TARIFF_HPP_
#define NANOGRID_TARIFF_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nanogrid {

enum class TouPeriod { kOffPeak, kMidPeak, kOnPeak };

const char* to_string(TouPeriod period);

// One time-of-use band covering start < t <= end (hours). A band whose start
// is later than its end wraps through midnight.
struct TouBand {
  double start_hour = 0.0;
  double end_hour = 0.0;
  double rate = 0.0;  // $/kWh
  TouPeriod period = TouPeriod::kOffPeak;
};

// Consumption tier: applies while month-to-date kWh <= upper_kwh. The last
// tier must have an infinite bound.
struct ProgressiveTier {
  double upper_kwh = 0.0;
  double rate = 0.0;  // $/kWh
};

// Climate change & environmental charge, summed into the DR rate.
struct CcecComponents {
  double rps = 0.005;  // synthetic default, $/kWh
  double ets = 0.003;
  double cgr = 0.002;

  double total() const { return rps + ets + cgr; }
};

// Time-indexed system marginal price, linearly interpolated between samples
// and held constant outside the sampled range.
class SmpSeries {
 public:
  SmpSeries() = default;
  // Samples as (absolute hour, $/kWh); sorted on construction.
  explicit SmpSeries(std::vector<std::pair<double, double>> samples);

  // Hourly diurnal sinusoid: mean + amplitude * cos(2*pi*(h - peak_hour)/24).
  static SmpSeries synthetic_diurnal(int days, double mean = 0.09,
                                     double amplitude = 0.02,
                                     double peak_hour = 20.0);

  // Reads the `hour_of_year, smp_usd_per_kwh` schema.
  static SmpSeries from_csv(const std::filesystem::path& path);
  void to_csv(const std::filesystem::path& path) const;

  // Replaces every sample by the mean of its 30-day block.
  SmpSeries monthly_average() const;

  double at(double hour) const;
  bool empty() const { return samples_.empty(); }
  const std::vector<std::pair<double, double>>& samples() const {
    return samples_;
  }

 private:
  std::vector<std::pair<double, double>> samples_;
};

class TariffSchedule {
 public:
  // Validates the schedule; throws ConfigError on a gap or overlap in the ToU
  // bands, non-increasing tier bounds, a bounded last tier or a negative rate.
  TariffSchedule(std::vector<TouBand> bands, std::vector<ProgressiveTier> tiers,
                 CcecComponents ccec, SmpSeries smp);

  // KEPCO-style bands 0.06 / 0.12 / 0.18 with tiers 0.008 / 0.018 / 0.027.
  static std::vector<TouBand> standard_bands();
  // Same band edges at 0.05 / 0.10 / 0.18.
  static std::vector<TouBand> legacy_bands();
  static std::vector<ProgressiveTier> standard_tiers();
  static TariffSchedule standard(SmpSeries smp, CcecComponents ccec = {});
  // Named preset: "standard" or "legacy".
  static std::vector<TouBand> bands_for_preset(const std::string& preset);

  double tou_rate(double time_of_day) const;
  TouPeriod tou_period(double time_of_day) const;
  double progressive_rate(double cum_month_kwh) const;
  double effective_dr_rate(double time_of_day, double cum_month_kwh) const;
  double smp_at(double hour) const;

  const std::vector<TouBand>& bands() const { return bands_; }
  const std::vector<ProgressiveTier>& tiers() const { return tiers_; }
  const CcecComponents& ccec() const { return ccec_; }
  const SmpSeries& smp() const { return smp_; }

 private:
  const TouBand& band_at(double time_of_day) const;

  std::vector<TouBand> bands_;
  std::vector<ProgressiveTier> tiers_;
  CcecComponents ccec_;
  SmpSeries smp_;
};

}  // namespace nanogrid

#endif  // NANOGRID_TARIFF_HPP_
