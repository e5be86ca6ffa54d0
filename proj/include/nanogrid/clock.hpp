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

#ifndef NANOGRID_CLOCK_HPP_
#define NANOGRID_CLOCK_HPP_

#include <cmath>

namespace nanogrid {

// Simulation runs on fixed 10-minute intervals.
inline constexpr int kIntervalsPerHour = 6;
inline constexpr int kIntervalsPerDay = 24 * kIntervalsPerHour;
inline constexpr double kIntervalHours = 1.0 / kIntervalsPerHour;
inline constexpr int kDaysPerMonth = 30;

// Time-of-day used for tariff and availability rules. Interval n covers
// (n*dt, (n+1)*dt]; rules written in the half-open "a < t <= b" form are
// evaluated at the interval's end so that, e.g., the interval ending at
// 09:00 still bills off-peak and the one ending at 09:10 bills mid-peak.
inline double interval_time_of_day(int n) {
  const double hours = (n % kIntervalsPerDay + 1) * kIntervalHours;
  return hours >= 24.0 ? hours - 24.0 : hours;
}

// Absolute hour at the end of interval n, counted from the scenario start.
inline double interval_end_hour(long n) {
  return static_cast<double>(n + 1) * kIntervalHours;
}

// Sample time of interval n within its day, in hours (interval start).
inline double interval_start_hour_of_day(int n) {
  return (n % kIntervalsPerDay) * kIntervalHours;
}

}  // namespace nanogrid

#endif  // NANOGRID_CLOCK_HPP_
