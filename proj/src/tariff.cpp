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

#include "nanogrid/tariff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nanogrid/csv.hpp"
#include "nanogrid/errors.hpp"

namespace nanogrid {
namespace {

constexpr double kDayHours = 24.0;
constexpr double kEdgeTolerance = 1e-9;

double wrap_hours(double h) {
  double r = std::fmod(h, kDayHours);
  if (r < 0.0) r += kDayHours;
  return r;
}

double band_length(const TouBand& band) {
  const double len = wrap_hours(band.end_hour - band.start_hour);
  return len == 0.0 ? kDayHours : len;
}

bool band_contains(const TouBand& band, double t) {
  const double offset = wrap_hours(t - band.start_hour);
  return offset > 0.0 && offset <= band_length(band);
}

void validate_bands(const std::vector<TouBand>& bands) {
  if (bands.empty()) throw ConfigError("tariff: no ToU bands");
  std::vector<TouBand> sorted = bands;
  for (const auto& b : sorted) {
    if (b.rate < 0.0) throw ConfigError("tariff: negative ToU rate");
    if (b.start_hour < 0.0 || b.start_hour >= kDayHours || b.end_hour < 0.0 ||
        b.end_hour > kDayHours) {
      throw ConfigError("tariff: ToU band edge outside [0, 24]");
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const TouBand& a, const TouBand& b) {
              return a.start_hour < b.start_hour;
            });
  double covered = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& cur = sorted[i];
    const auto& next = sorted[(i + 1) % sorted.size()];
    const double gap = wrap_hours(next.start_hour - cur.end_hour);
    if (gap > kEdgeTolerance && kDayHours - gap > kEdgeTolerance) {
      throw ConfigError("tariff: ToU bands leave a gap or overlap at hour " +
                        format_number(cur.end_hour));
    }
    covered += band_length(cur);
  }
  if (std::abs(covered - kDayHours) > kEdgeTolerance) {
    throw ConfigError("tariff: ToU bands cover " + format_number(covered) +
                      " h instead of 24 h");
  }
}

void validate_tiers(const std::vector<ProgressiveTier>& tiers) {
  if (tiers.empty()) throw ConfigError("tariff: no progressive tiers");
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    if (tiers[i].rate < 0.0) throw ConfigError("tariff: negative tier rate");
    if (i > 0 && !(tiers[i].upper_kwh > tiers[i - 1].upper_kwh)) {
      throw ConfigError("tariff: tier bounds must be strictly increasing");
    }
  }
  if (!std::isinf(tiers.back().upper_kwh)) {
    throw ConfigError("tariff: last progressive tier must be unbounded");
  }
}

}  // namespace

const char* to_string(TouPeriod period) {
  switch (period) {
    case TouPeriod::kOffPeak: return "off-peak";
    case TouPeriod::kMidPeak: return "mid-peak";
    case TouPeriod::kOnPeak: return "on-peak";
  }
  return "?";
}

SmpSeries::SmpSeries(std::vector<std::pair<double, double>> samples)
    : samples_(std::move(samples)) {
  std::stable_sort(samples_.begin(), samples_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [hour, rate] : samples_) {
    if (!(rate >= 0.0)) throw ConfigError("smp: negative or NaN price");
  }
}

SmpSeries SmpSeries::synthetic_diurnal(int days, double mean, double amplitude,
                                       double peak_hour) {
  std::vector<std::pair<double, double>> samples;
  samples.reserve(static_cast<std::size_t>(days) * 24 + 1);
  for (int h = 0; h <= days * 24; ++h) {
    const double phase = 2.0 * std::numbers::pi * (h - peak_hour) / kDayHours;
    samples.emplace_back(h, mean + amplitude * std::cos(phase));
  }
  return SmpSeries(std::move(samples));
}

SmpSeries SmpSeries::from_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const auto hour_col = table.column("hour_of_year");
  const auto smp_col = table.column("smp_usd_per_kwh");
  std::vector<std::pair<double, double>> samples;
  for (const auto& row : table.rows) {
    samples.emplace_back(parse_number(row[hour_col], path.string()),
                         parse_number(row[smp_col], path.string()));
  }
  if (samples.empty()) throw ConfigError(path.string() + ": no SMP samples");
  return SmpSeries(std::move(samples));
}

void SmpSeries::to_csv(const std::filesystem::path& path) const {
  CsvWriter out(path, {"hour_of_year", "smp_usd_per_kwh"});
  for (const auto& [hour, rate] : samples_) out.row(hour, rate);
}

SmpSeries SmpSeries::monthly_average() const {
  constexpr double kMonthHours = 24.0 * 30.0;
  std::vector<std::pair<double, double>> out = samples_;
  std::size_t begin = 0;
  while (begin < out.size()) {
    const double block = std::floor(out[begin].first / kMonthHours);
    std::size_t end = begin;
    double sum = 0.0;
    while (end < out.size() &&
           std::floor(out[end].first / kMonthHours) == block) {
      sum += out[end].second;
      ++end;
    }
    const double avg = sum / static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) out[i].second = avg;
    begin = end;
  }
  return SmpSeries(std::move(out));
}

double SmpSeries::at(double hour) const {
  if (samples_.empty()) throw ConfigError("smp: empty series");
  if (hour <= samples_.front().first) return samples_.front().second;
  if (hour >= samples_.back().first) return samples_.back().second;
  const auto upper = std::upper_bound(
      samples_.begin(), samples_.end(), hour,
      [](double h, const auto& s) { return h < s.first; });
  const auto lower = upper - 1;
  const double span = upper->first - lower->first;
  if (span <= 0.0) return upper->second;
  const double w = (hour - lower->first) / span;
  return lower->second + w * (upper->second - lower->second);
}

TariffSchedule::TariffSchedule(std::vector<TouBand> bands,
                               std::vector<ProgressiveTier> tiers,
                               CcecComponents ccec, SmpSeries smp)
    : bands_(std::move(bands)),
      tiers_(std::move(tiers)),
      ccec_(ccec),
      smp_(std::move(smp)) {
  validate_bands(bands_);
  validate_tiers(tiers_);
  if (ccec_.rps < 0.0 || ccec_.ets < 0.0 || ccec_.cgr < 0.0) {
    throw ConfigError("tariff: negative climate/environment charge");
  }
  if (smp_.empty()) throw ConfigError("tariff: empty SMP series");
}

std::vector<TouBand> TariffSchedule::standard_bands() {
  using P = TouPeriod;
  return {
      {23.0, 9.0, 0.06, P::kOffPeak},  {9.0, 10.0, 0.12, P::kMidPeak},
      {10.0, 12.0, 0.18, P::kOnPeak},  {12.0, 13.0, 0.12, P::kMidPeak},
      {13.0, 17.0, 0.18, P::kOnPeak},  {17.0, 23.0, 0.12, P::kMidPeak},
  };
}

std::vector<TouBand> TariffSchedule::legacy_bands() {
  auto bands = standard_bands();
  for (auto& b : bands) {
    if (b.period == TouPeriod::kOffPeak) b.rate = 0.05;
    if (b.period == TouPeriod::kMidPeak) b.rate = 0.10;
  }
  return bands;
}

std::vector<ProgressiveTier> TariffSchedule::standard_tiers() {
  return {{300.0, 0.008},
          {450.0, 0.018},
          {std::numeric_limits<double>::infinity(), 0.027}};
}

std::vector<TouBand> TariffSchedule::bands_for_preset(const std::string& preset) {
  if (preset == "standard") return standard_bands();
  if (preset == "legacy") return legacy_bands();
  throw ConfigError("tariff: unknown preset '" + preset + "'");
}

TariffSchedule TariffSchedule::standard(SmpSeries smp, CcecComponents ccec) {
  return TariffSchedule(standard_bands(), standard_tiers(), ccec,
                        std::move(smp));
}

const TouBand& TariffSchedule::band_at(double time_of_day) const {
  const double t = wrap_hours(time_of_day);
  for (const auto& band : bands_) {
    if (band_contains(band, t)) return band;
  }
  // Unreachable for a validated partition; guards rounding at band edges.
  return bands_.front();
}

double TariffSchedule::tou_rate(double time_of_day) const {
  return band_at(time_of_day).rate;
}

TouPeriod TariffSchedule::tou_period(double time_of_day) const {
  return band_at(time_of_day).period;
}

double TariffSchedule::progressive_rate(double cum_month_kwh) const {
  if (!(cum_month_kwh >= 0.0)) {
    throw DomainError("progressive_rate: month-to-date kWh must be >= 0");
  }
  for (const auto& tier : tiers_) {
    if (cum_month_kwh <= tier.upper_kwh) return tier.rate;
  }
  return tiers_.back().rate;
}

double TariffSchedule::effective_dr_rate(double time_of_day,
                                         double cum_month_kwh) const {
  return tou_rate(time_of_day) + progressive_rate(cum_month_kwh) +
         ccec_.total();
}

double TariffSchedule::smp_at(double hour) const { return smp_.at(hour); }

}  // namespace nanogrid
