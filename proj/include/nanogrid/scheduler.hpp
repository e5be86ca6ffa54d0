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

#ifndef NANOGRID_SCHEDULER_HPP_
#define NANOGRID_SCHEDULER_HPP_

#include <span>
#include <vector>

#include "nanogrid/demand.hpp"

namespace nanogrid {

// Outcome of peak-shaving placement over a fixed horizon.
struct SwitchPlan {
  std::vector<int> start;  // per request, same order as the input
  std::vector<int> duration;
  std::vector<bool> schedulable;
  std::vector<double> load_kw;  // background plus every placed request

  // O(n) of request i: 1 while it runs. Runs past the horizon are truncated.
  bool is_on(std::size_t request, int n) const {
    return n >= start[request] && n < start[request] + duration[request];
  }
  double peak() const;
};

// Peak-shaving placement. Every request first sits at its arrival; the
// schedulable ones are then revisited in arrival order and each moves to the
// s in [arrival, arrival + d_max] that minimizes the peak of the whole
// profile (requests not yet revisited stay at their arrival), earliest s on
// ties. Non-schedulable requests never move, and the final peak is never
// above the all-on-arrival peak. The window is cut at the horizon (the length
// of `background_kw`); requests arriving at or past the horizon are ignored
// in the profile but keep their arrival start.
SwitchPlan schedule_flexible(std::span<const LoadRequest> requests,
                             std::span<const double> background_kw, int d_max);

struct SourceMix {
  double res_kw = 0.0;
  double ev_kw = 0.0;
  double p2p_kw = 0.0;
  double grid_kw = 0.0;
  double surplus_kw = 0.0;  // RES left after serving the demand

  bool grid_on() const { return grid_kw > 0.0; }
  bool res_on() const { return res_kw > 0.0; }
  bool ev_on() const { return ev_kw > 0.0; }
  double served() const { return res_kw + ev_kw + p2p_kw + grid_kw; }
};

// Fills `demand_kw` from RES, then EV discharge, then P2P purchase, then the
// grid. Throws DomainError on a negative input.
SourceMix dispatch_sources(double demand_kw, double res_kw,
                           double ev_discharge_kw, double p2p_bought_kw);

}  // namespace nanogrid

#endif  // NANOGRID_SCHEDULER_HPP_
