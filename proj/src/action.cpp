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

#include "nanogrid/action.hpp"

#include <array>

#include "nanogrid/errors.hpp"

namespace nanogrid {
namespace {

constexpr std::array<TradeAction, 3> kResActions = {
    TradeAction::kBuyRes, TradeAction::kSellRes, TradeAction::kIdle};
constexpr std::array<TradeAction, 5> kUtResActions = {
    TradeAction::kBuyUt, TradeAction::kBuyRes, TradeAction::kSellUt,
    TradeAction::kSellRes, TradeAction::kIdle};

}  // namespace

int action_count(ActionSpace space) {
  return space == ActionSpace::kRes ? 3 : 5;
}

TradeAction action_from_index(ActionSpace space, int index) {
  if (index < 0 || index >= action_count(space)) {
    throw ContractError("action index " + std::to_string(index) +
                        " out of range for " + to_string(space));
  }
  return space == ActionSpace::kRes ? kResActions[index] : kUtResActions[index];
}

int action_index(ActionSpace space, TradeAction action) {
  for (int i = 0; i < action_count(space); ++i) {
    if (action_from_index(space, i) == action) return i;
  }
  throw ContractError(std::string("action ") + to_string(action) +
                      " is not in the " + to_string(space) + " space");
}

bool action_allowed(ActionSpace space, TradeAction action) {
  return space == ActionSpace::kUtRes || !uses_utility(action);
}

const char* to_string(TradeAction action) {
  switch (action) {
    case TradeAction::kSellUt: return "sell_ut";
    case TradeAction::kSellRes: return "sell_res";
    case TradeAction::kIdle: return "idle";
    case TradeAction::kBuyRes: return "buy_res";
    case TradeAction::kBuyUt: return "buy_ut";
  }
  return "?";
}

const char* to_string(ActionSpace space) {
  return space == ActionSpace::kRes ? "res" : "ut_res";
}

ActionSpace parse_action_space(const std::string& name) {
  if (name == "res") return ActionSpace::kRes;
  if (name == "ut_res") return ActionSpace::kUtRes;
  throw ConfigError("unknown action space '" + name + "' (expected res|ut_res)");
}

}  // namespace nanogrid
