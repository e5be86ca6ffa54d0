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

#ifndef NANOGRID_AGENTS_UPDATES_HPP_
#define NANOGRID_AGENTS_UPDATES_HPP_

#include <vector>

#include "nanogrid/agents/hyperparams.hpp"
#include "nanogrid/agents/networks.hpp"
#include "nanogrid/agents/replay.hpp"
#include "nanogrid/nn/optim.hpp"

namespace nanogrid::agents {

// With probability epsilon a uniform index, otherwise the first argmax of q.
int epsilon_greedy(const std::vector<double>& q, double epsilon, Rng& rng);

// One-step Q-learning regression. target = r + gamma * max_a' Q_target(s', a'),
// or r on a terminal transition; loss = mean (target - Q(s, a))^2. Returns the
// loss before the Adam step. `target` may alias `online`, which gives the
// shared-weights form.
double dqn_update(MlpNet& online, MlpNet& target, nn::Adam& opt,
                  const std::vector<const Transition*>& batch, double gamma);

// The same regression over sequences. Both networks unroll from a zero state;
// the first `burn_in` steps only warm the state and carry no loss.
double drqn_update(RecurrentQNet& online, RecurrentQNet& target, nn::Adam& opt,
                   const std::vector<std::vector<const Transition*>>& sequences,
                   int burn_in, double gamma);

struct Rollout {
  std::vector<std::vector<double>> states;
  std::vector<int> actions;
  std::vector<double> log_probs;  // under the acting policy
  std::vector<double> rewards;
  std::vector<double> values;  // critic estimate at each state
  std::vector<char> dones;
  double last_value = 0.0;  // critic estimate after the final step

  std::size_t size() const { return actions.size(); }
  void clear();
};

// min(r A, clip(r, 1 - eps, 1 + eps) A) for one sample.
double ppo_clip_objective(double ratio, double advantage, double clip);

// Generalized advantage estimates and the matching returns (A + V).
void gae(const Rollout& r, double gamma, double lambda, std::vector<double>& advantages,
         std::vector<double>& returns);

// Shift to zero mean and scale to unit deviation.
void normalize(std::vector<double>& xs);

struct PpoStats {
  double policy_loss = 0.0;  // mean over epochs of -objective
  double value_loss = 0.0;   // mean over epochs
  // Largest |ratio - 1| seen in the first epoch; zero unless the policy moved
  // between acting and updating.
  double first_epoch_ratio_deviation = 0.0;
};

// Clipped-surrogate actor update and value regression over the rollout for
// hp.epochs full-batch passes, with separate optimizers.
PpoStats ppo_update(MlpNet& actor, MlpNet& critic, nn::Adam& actor_opt,
                    nn::Adam& critic_opt, const Rollout& rollout, const Hyperparams& hp);

}  // namespace nanogrid::agents

#endif  // NANOGRID_AGENTS_UPDATES_HPP_
