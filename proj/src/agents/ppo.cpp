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

#include <algorithm>
#include <cmath>

#include "nanogrid/agents/updates.hpp"
#include "nanogrid/errors.hpp"

namespace nanogrid::agents {

void Rollout::clear() {
  states.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  dones.clear();
  last_value = 0.0;
}

double ppo_clip_objective(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

void gae(const Rollout& r, double gamma, double lambda, std::vector<double>& advantages,
         std::vector<double>& returns) {
  const std::size_t n = r.size();
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double mask = r.dones[k] ? 0.0 : 1.0;
    const double next_value = k + 1 < n ? r.values[k + 1] : r.last_value;
    const double delta = r.rewards[k] + gamma * next_value * mask - r.values[k];
    running = delta + gamma * lambda * mask * running;
    advantages[k] = running;
    returns[k] = running + r.values[k];
  }
}

void normalize(std::vector<double>& xs) {
  if (xs.empty()) return;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(xs.size()));
  for (double& x : xs) x = (x - mean) / (sd + 1e-8);
}

PpoStats ppo_update(MlpNet& actor, MlpNet& critic, nn::Adam& actor_opt,
                    nn::Adam& critic_opt, const Rollout& rollout, const Hyperparams& hp) {
  const int n = static_cast<int>(rollout.size());
  if (n < hp.update_interval || n == 0) {
    throw ContractError("ppo_update: rollout of " + std::to_string(n) +
                        " steps, update interval is " +
                        std::to_string(hp.update_interval));
  }
  if (rollout.states.size() != rollout.size() || rollout.rewards.size() != rollout.size() ||
      rollout.log_probs.size() != rollout.size() ||
      rollout.values.size() != rollout.size() || rollout.dones.size() != rollout.size()) {
    throw ContractError("ppo_update: rollout columns differ in length");
  }
  std::vector<double> adv, ret;
  gae(rollout, hp.gamma, hp.gae_lambda, adv, ret);
  if (hp.normalize_advantages) normalize(adv);

  const int cols = static_cast<int>(rollout.states[0].size());
  Tensor states = Tensor::matrix(n, cols);
  for (int k = 0; k < n; ++k) {
    std::copy(rollout.states[k].begin(), rollout.states[k].end(), states.data() + k * cols);
  }
  Tensor old_logp = Tensor::matrix(n, 1);
  Tensor advantages = Tensor::matrix(n, 1);
  Tensor returns = Tensor::matrix(n, 1);
  for (int k = 0; k < n; ++k) {
    old_logp.at(k, 0) = rollout.log_probs[k];
    advantages.at(k, 0) = adv[k];
    returns.at(k, 0) = ret[k];
  }

  PpoStats stats;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    {
      Tape t;
      const Var logits = actor.forward(t, states);
      const Var logp_all = nn::log_softmax(t, logits);
      const Var logp = nn::gather_cols(t, logp_all, rollout.actions);
      const Var ratio = nn::exp(t, nn::sub(t, logp, t.constant(old_logp)));
      if (epoch == 0) {
        const Tensor& r = t.value(ratio);
        for (std::size_t k = 0; k < r.size(); ++k) {
          stats.first_epoch_ratio_deviation =
              std::max(stats.first_epoch_ratio_deviation, std::abs(r[k] - 1.0));
        }
      }
      const Var a = t.constant(advantages);
      const Var surr1 = nn::mul(t, ratio, a);
      const Var surr2 = nn::mul(t, nn::clamp(t, ratio, 1.0 - hp.clip, 1.0 + hp.clip), a);
      Var loss = nn::scale(t, nn::mean(t, nn::minimum(t, surr1, surr2)), -1.0);
      if (hp.entropy_coef > 0.0) {
        // sum_a p log p, averaged over rows, is the negative entropy.
        const Var neg_entropy =
            nn::mean(t, nn::mul(t, nn::exp(t, logp_all), logp_all));
        loss = nn::add(t, loss, nn::scale(t, neg_entropy,
                                          hp.entropy_coef * actor.layers.back().out()));
      }
      const double value = t.value(loss)[0];
      if (!std::isfinite(value)) throw std::runtime_error("ppo_update: non-finite policy loss");
      stats.policy_loss += value / hp.epochs;
      t.backward(loss);
      actor_opt.step();
    }
    {
      Tape t;
      const Var v = critic.forward(t, states);
      const Var loss = nn::mean(t, nn::square(t, nn::sub(t, v, t.constant(returns))));
      const double value = t.value(loss)[0];
      if (!std::isfinite(value)) throw std::runtime_error("ppo_update: non-finite value loss");
      stats.value_loss += value / hp.epochs;
      t.backward(loss);
      critic_opt.step();
    }
  }
  return stats;
}

}  // namespace nanogrid::agents
