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

#ifndef NANOGRID_AGENTS_HYPERPARAMS_HPP_
#define NANOGRID_AGENTS_HYPERPARAMS_HPP_

#include <string>

#include "nanogrid/action.hpp"

namespace nanogrid::agents {

enum class Algorithm { kDqn, kDrqn, kBiDrqn, kPpo };

const char* to_string(Algorithm algo);
// "dqn", "drqn", "bi_drqn", "ppo". ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);
bool is_recurrent(Algorithm algo);

// An algorithm with its action space and encoder choice. Names are
// [n_][gcn_]<algorithm>, e.g. "n_ppo" (five actions) or "gcn_drqn".
struct Variant {
  Algorithm algo = Algorithm::kDqn;
  ActionSpace space = ActionSpace::kRes;
  bool gcn = false;

  std::string name() const;
};
Variant parse_variant(const std::string& name);

struct Hyperparams {
  // Shared.
  double gamma = 0.95;
  int batch = 128;  // transitions; recurrent agents count timesteps
  int hidden = 64;
  int gcn_features = 8;  // encoder output width per node
  double grad_clip = 10.0;  // joint L2 norm, 0 disables

  // Q family.
  double epsilon = 0.1;
  double epsilon_decay = 0.995;
  double epsilon_min = 0.01;
  double lr = 0.005;
  int replay_capacity = 10000;
  bool target_net = true;
  int target_sync = 200;  // updates between target copies
  int train_every = 16;   // environment steps between updates
  int seq_len = 8;
  int burn_in = 4;

  // PPO.
  double actor_lr = 5e-4;
  double critic_lr = 1e-3;
  double clip = 0.1;
  double gae_lambda = 0.95;
  int update_interval = 128;
  int epochs = 3;
  bool normalize_advantages = true;
  double entropy_coef = 0.0;

  // Defaults for an algorithm: PPO discounts with 0.99 and recurrent agents
  // update every 32 steps.
  static Hyperparams defaults(Algorithm algo);
  // ConfigError naming the first bad field.
  void validate() const;
};

// epsilon * decay, floored at epsilon_min.
double decay_epsilon(double epsilon, const Hyperparams& hp);

}  // namespace nanogrid::agents

#endif  // NANOGRID_AGENTS_HYPERPARAMS_HPP_
