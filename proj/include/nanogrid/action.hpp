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

#ifndef NANOGRID_ACTION_HPP_
#define NANOGRID_ACTION_HPP_

#include <string>

namespace nanogrid {

// Trading labels. The numeric values are the labels themselves: +2/-2 trade
// with the utility, +1/-1 with the other clusters' renewables.
enum class TradeAction : int {
  kSellUt = -2,
  kSellRes = -1,
  kIdle = 0,
  kBuyRes = 1,
  kBuyUt = 2,
};

enum class ActionSpace { kRes, kUtRes };

int action_count(ActionSpace space);
// Index order: RES space {BuyRES, SellRES, Idle}; UT+RES space {BuyUT,
// BuyRES, SellUT, SellRES, Idle}.
TradeAction action_from_index(ActionSpace space, int index);
int action_index(ActionSpace space, TradeAction action);
bool action_allowed(ActionSpace space, TradeAction action);

inline bool is_buy(TradeAction a) { return static_cast<int>(a) > 0; }
inline bool is_sell(TradeAction a) { return static_cast<int>(a) < 0; }
inline bool uses_utility(TradeAction a) {
  return a == TradeAction::kBuyUt || a == TradeAction::kSellUt;
}

const char* to_string(TradeAction action);
const char* to_string(ActionSpace space);
ActionSpace parse_action_space(const std::string& name);

}  // namespace nanogrid

#endif  // NANOGRID_ACTION_HPP_
