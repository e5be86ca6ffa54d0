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

#include "nanogrid/scheduler.hpp"

#include <algorithm>
#include <numeric>

#include "nanogrid/errors.hpp"

namespace nanogrid {

double SwitchPlan::peak() const {
  return load_kw.empty() ? 0.0 : *std::max_element(load_kw.begin(), load_kw.end());
}

SwitchPlan schedule_flexible(std::span<const LoadRequest> requests,
                             std::span<const double> background_kw, int d_max) {
  if (d_max < 0) throw ContractError("schedule_flexible: d_max must be >= 0");
  const int horizon = static_cast<int>(background_kw.size());

  SwitchPlan plan;
  plan.load_kw.assign(background_kw.begin(), background_kw.end());
  plan.start.resize(requests.size());
  plan.duration.resize(requests.size());
  plan.schedulable.resize(requests.size());

  std::vector<std::size_t> order(requests.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto& ra = requests[a];
                     const auto& rb = requests[b];
                     if (ra.interval != rb.interval) return ra.interval < rb.interval;
                     return !ra.schedulable && rb.schedulable;
                   });

  // Every request starts at its arrival; schedulable ones are then moved one
  // at a time in arrival order. A move is judged on the whole profile,
  // including requests not yet visited, and staying put is always a
  // candidate, so no move can raise the peak.
  auto place = [&](const LoadRequest& req, int s, double sign) {
    const int end = std::min(s + req.duration, horizon);
    for (int m = std::max(s, 0); m < end; ++m) plan.load_kw[m] += sign * req.power_kw;
  };
  for (std::size_t idx = 0; idx < requests.size(); ++idx) {
    plan.start[idx] = requests[idx].interval;
    plan.duration[idx] = requests[idx].duration;
    plan.schedulable[idx] = requests[idx].schedulable;
    place(requests[idx], requests[idx].interval, 1.0);
  }

  for (std::size_t idx : order) {
    const LoadRequest& req = requests[idx];
    if (!req.schedulable || req.interval >= horizon || d_max == 0) continue;
    place(req, req.interval, -1.0);
    const int last = std::min(req.interval + d_max, horizon - 1);
    int best = req.interval;
    double best_peak = 0.0;
    for (int s = req.interval; s <= last; ++s) {
      const int end = std::min(s + req.duration, horizon);
      double candidate = 0.0;
      for (int m = 0; m < horizon; ++m) {
        const double load = plan.load_kw[m] + (m >= s && m < end ? req.power_kw : 0.0);
        candidate = std::max(candidate, load);
      }
      if (s == req.interval || candidate < best_peak) {
        best_peak = candidate;
        best = s;
      }
    }
    plan.start[idx] = best;
    place(req, best, 1.0);
  }
  return plan;
}

SourceMix dispatch_sources(double demand_kw, double res_kw,
                           double ev_discharge_kw, double p2p_bought_kw) {
  if (demand_kw < 0.0 || res_kw < 0.0 || ev_discharge_kw < 0.0 ||
      p2p_bought_kw < 0.0) {
    throw DomainError("dispatch_sources: inputs must be >= 0");
  }
  SourceMix mix;
  double remaining = demand_kw;
  mix.res_kw = std::min(res_kw, remaining);
  remaining -= mix.res_kw;
  mix.ev_kw = std::min(ev_discharge_kw, remaining);
  remaining -= mix.ev_kw;
  mix.p2p_kw = std::min(p2p_bought_kw, remaining);
  remaining -= mix.p2p_kw;
  mix.grid_kw = remaining;
  mix.surplus_kw = res_kw - mix.res_kw;
  return mix;
}

}  // namespace nanogrid
