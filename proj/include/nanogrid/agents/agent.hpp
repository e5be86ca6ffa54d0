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

#ifndef NANOGRID_AGENTS_AGENT_HPP_
#define NANOGRID_AGENTS_AGENT_HPP_

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "nanogrid/agents/hyperparams.hpp"
#include "nanogrid/agents/networks.hpp"
#include "nanogrid/agents/replay.hpp"
#include "nanogrid/agents/updates.hpp"

namespace nanogrid::agents {

struct AgentConfig {
  Variant variant;
  Hyperparams hp;
  int clusters = 10;  // state width is 2 * clusters + 2
  // Observations are divided by these before reaching a network: power
  // entries (D, S) by power_scale, prices (DR, SMP) by price_scale.
  double power_scale = 1.0;
  double price_scale = 1.0;
  std::uint64_t seed = 0;
  int id = 0;
};

// One cluster's learner. Owns its networks, optimizer, replay and random
// stream; nothing is shared between agents.
class Agent {
 public:
  explicit Agent(const AgentConfig& cfg);
  virtual ~Agent() = default;

  // Action index for a raw (unscaled) state. explore = false gives the
  // greedy choice.
  virtual int act(const std::vector<double>& state, bool explore) = 0;
  // Feeds back the outcome of the last act() and trains when due.
  virtual void observe(const std::vector<double>& state, int action, double reward,
                       const std::vector<double>& next_state, bool done) = 0;
  virtual void begin_episode() {}
  // Decays epsilon (Q family) and closes the episode for replay tagging.
  virtual void end_episode();
  virtual std::vector<Parameter*> parameters() = 0;

  const AgentConfig& config() const { return cfg_; }
  int actions() const { return action_count(cfg_.variant.space); }
  double epsilon() const { return epsilon_; }
  // Mean loss of the updates since the last end_episode(); 0 if none ran.
  double episode_loss() const;
  long updates() const { return updates_; }

  void save(const std::string& path);
  void load(const std::string& path);

 protected:
  std::vector<double> scale(const std::vector<double>& state) const;
  void record_loss(double loss);

  AgentConfig cfg_;
  Rng rng_;
  double epsilon_;
  long episode_ = 0;
  long updates_ = 0;
  double loss_sum_ = 0.0;
  long loss_count_ = 0;
  double last_loss_ = 0.0;
};

class DqnAgent : public Agent {
 public:
  explicit DqnAgent(const AgentConfig& cfg);

  int act(const std::vector<double>& state, bool explore) override;
  void observe(const std::vector<double>& state, int action, double reward,
               const std::vector<double>& next_state, bool done) override;
  std::vector<Parameter*> parameters() override { return online_.parameters(); }

  std::vector<double> q_values(const std::vector<double>& state);
  MlpNet& online() { return online_; }
  MlpNet& target() { return cfg_.hp.target_net ? target_ : online_; }
  void sync_target();

 private:
  MlpNet online_;
  MlpNet target_;
  nn::Adam opt_;
  ReplayBuffer replay_;
  long steps_ = 0;
};

// DRQN and Bi-DRQN. DRQN acts with its LSTM state carried through the
// episode. Bi-DRQN has no causal state to carry, so it acts on the last
// seq_len observations of the episode, the same window shape it trains on.
class DrqnAgent : public Agent {
 public:
  explicit DrqnAgent(const AgentConfig& cfg);

  int act(const std::vector<double>& state, bool explore) override;
  void observe(const std::vector<double>& state, int action, double reward,
               const std::vector<double>& next_state, bool done) override;
  void begin_episode() override;
  std::vector<Parameter*> parameters() override { return online_.parameters(); }

  RecurrentQNet& online() { return online_; }
  void sync_target();

 private:
  RecurrentQNet online_;
  RecurrentQNet target_;
  nn::Adam opt_;
  ReplayBuffer replay_;
  std::deque<std::vector<double>> window_;
  Tensor h_, c_;
  long steps_ = 0;
};

// Categorical actor and state-value critic, each its own network.
class PpoAgent : public Agent {
 public:
  explicit PpoAgent(const AgentConfig& cfg);

  int act(const std::vector<double>& state, bool explore) override;
  void observe(const std::vector<double>& state, int action, double reward,
               const std::vector<double>& next_state, bool done) override;
  std::vector<Parameter*> parameters() override;

  std::vector<double> probabilities(const std::vector<double>& state);
  const PpoStats& last_stats() const { return stats_; }

 private:
  double value(const std::vector<double>& scaled);

  MlpNet actor_;
  MlpNet critic_;
  nn::Adam actor_opt_;
  nn::Adam critic_opt_;
  Rollout rollout_;
  double pending_log_prob_ = 0.0;
  double pending_value_ = 0.0;
  PpoStats stats_;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg);

}  // namespace nanogrid::agents

#endif  // NANOGRID_AGENTS_AGENT_HPP_
