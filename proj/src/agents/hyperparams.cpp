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

#include "nanogrid/agents/hyperparams.hpp"

#include <algorithm>

#include "nanogrid/errors.hpp"

namespace nanogrid::agents {

const char* to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kDqn: return "dqn";
    case Algorithm::kDrqn: return "drqn";
    case Algorithm::kBiDrqn: return "bi_drqn";
    case Algorithm::kPpo: return "ppo";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kDqn, Algorithm::kDrqn, Algorithm::kBiDrqn,
                      Algorithm::kPpo}) {
    if (name == to_string(a)) return a;
  }
  throw ConfigError("unknown algorithm \"" + name +
                    "\" (expected dqn, drqn, bi_drqn or ppo)");
}

bool is_recurrent(Algorithm algo) {
  return algo == Algorithm::kDrqn || algo == Algorithm::kBiDrqn;
}

std::string Variant::name() const {
  std::string s;
  if (space == ActionSpace::kUtRes) s += "n_";
  if (gcn) s += "gcn_";
  return s + to_string(algo);
}

Variant parse_variant(const std::string& name) {
  Variant v;
  std::string rest = name;
  if (rest.rfind("n_", 0) == 0) {
    v.space = ActionSpace::kUtRes;
    rest = rest.substr(2);
  }
  if (rest.rfind("gcn_", 0) == 0) {
    v.gcn = true;
    rest = rest.substr(4);
  }
  try {
    v.algo = parse_algorithm(rest);
  } catch (const ConfigError&) {
    throw ConfigError("unknown algorithm \"" + name +
                      "\" (expected [n_][gcn_]dqn|drqn|bi_drqn|ppo or baseline)");
  }
  return v;
}

Hyperparams Hyperparams::defaults(Algorithm algo) {
  Hyperparams hp;
  if (algo == Algorithm::kPpo) hp.gamma = 0.99;
  // A recurrent update costs about seq_len times a feedforward one.
  if (is_recurrent(algo)) hp.train_every = 32;
  return hp;
}

void Hyperparams::validate() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("hyperparams: " + what);
  };
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon && epsilon <= 1.0)) {
    fail("need 0 <= epsilon_min <= epsilon <= 1");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) fail("epsilon_decay must lie in (0, 1]");
  if (batch < 1) fail("batch must be >= 1");
  if (hidden < 1) fail("hidden must be >= 1");
  if (gcn_features < 1) fail("gcn_features must be >= 1");
  if (!(lr > 0.0 && actor_lr > 0.0 && critic_lr > 0.0)) fail("learning rates must be positive");
  if (grad_clip < 0.0) fail("grad_clip must be >= 0");
  if (replay_capacity < batch) fail("replay_capacity must be >= batch");
  if (target_sync < 1) fail("target_sync must be >= 1");
  if (train_every < 1) fail("train_every must be >= 1");
  if (seq_len < 1) fail("seq_len must be >= 1");
  if (burn_in < 0 || burn_in >= seq_len) fail("burn_in must lie in [0, seq_len)");
  if (!(clip > 0.0 && clip < 1.0)) fail("clip must lie in (0, 1)");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) fail("gae_lambda must lie in [0, 1]");
  if (update_interval < 1) fail("update_interval must be >= 1");
  if (epochs < 1) fail("epochs must be >= 1");
  if (entropy_coef < 0.0) fail("entropy_coef must be >= 0");
}

double decay_epsilon(double epsilon, const Hyperparams& hp) {
  return std::max(hp.epsilon_min, epsilon * hp.epsilon_decay);
}

}  // namespace nanogrid::agents
