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

#include "nanogrid/agents/agent.hpp"

#include <algorithm>
#include <cmath>

#include "nanogrid/errors.hpp"
#include "nanogrid/nn/checkpoint.hpp"

namespace nanogrid::agents {
namespace {

std::optional<int> gcn_clusters(const AgentConfig& cfg) {
  if (!cfg.variant.gcn) return std::nullopt;
  return cfg.clusters;
}

Rng init_rng(const AgentConfig& cfg) { return Rng::derive(cfg.seed, 0x1000 + cfg.id); }

nn::AdamConfig adam(double lr, const Hyperparams& hp) {
  nn::AdamConfig c;
  c.lr = lr;
  c.clip_norm = hp.grad_clip;
  return c;
}

std::string tag(const AgentConfig& cfg) {
  return "agent" + std::to_string(cfg.id);
}

std::vector<double> first_row(const Tensor& t) {
  return {t.data(), t.data() + t.cols()};
}

}  // namespace

Agent::Agent(const AgentConfig& cfg)
    : cfg_(cfg), rng_(Rng::derive(cfg.seed, 0x2000 + cfg.id)), epsilon_(cfg.hp.epsilon) {
  cfg_.hp.validate();
  if (cfg.clusters < 1) throw ConfigError("agent: clusters must be >= 1");
  if (!(cfg.power_scale > 0.0 && cfg.price_scale > 0.0)) {
    throw ConfigError("agent: observation scales must be positive");
  }
}

void Agent::end_episode() {
  if (cfg_.variant.algo != Algorithm::kPpo) epsilon_ = decay_epsilon(epsilon_, cfg_.hp);
  ++episode_;
  loss_sum_ = 0.0;
  loss_count_ = 0;
}

double Agent::episode_loss() const {
  return loss_count_ == 0 ? 0.0 : loss_sum_ / static_cast<double>(loss_count_);
}

void Agent::record_loss(double loss) {
  ++updates_;
  last_loss_ = loss;
  loss_sum_ += loss;
  ++loss_count_;
}

std::vector<double> Agent::scale(const std::vector<double>& state) const {
  const std::size_t expected = 2 * static_cast<std::size_t>(cfg_.clusters) + 2;
  if (state.size() != expected) {
    throw ContractError("agent: state of width " + std::to_string(state.size()) +
                        ", expected " + std::to_string(expected));
  }
  std::vector<double> out(state.size());
  for (std::size_t i = 0; i + 2 < state.size(); ++i) out[i] = state[i] / cfg_.power_scale;
  out[expected - 2] = state[expected - 2] / cfg_.price_scale;
  out[expected - 1] = state[expected - 1] / cfg_.price_scale;
  return out;
}

void Agent::save(const std::string& path) {
  std::vector<const Parameter*> ps;
  for (Parameter* p : parameters()) ps.push_back(p);
  nn::save_checkpoint(path, ps);
}

void Agent::load(const std::string& path) { nn::load_checkpoint(path, parameters()); }

// ---------------------------------------------------------------------------

DqnAgent::DqnAgent(const AgentConfig& cfg)
    : Agent(cfg), replay_(static_cast<std::size_t>(cfg.hp.replay_capacity)) {
  Rng rng = init_rng(cfg);
  online_ = MlpNet(tag(cfg) + ".q", 2 * cfg.clusters + 2, {cfg.hp.hidden, cfg.hp.hidden},
                   actions(), nn::Activation::kRelu, gcn_clusters(cfg),
                   cfg.hp.gcn_features, rng);
  target_ = online_;
  opt_ = nn::Adam(online_.parameters(), adam(cfg.hp.lr, cfg.hp));
}

std::vector<double> DqnAgent::q_values(const std::vector<double>& state) {
  Tape t(false);
  return first_row(t.value(online_.forward(t, Tensor::row(scale(state)))));
}

int DqnAgent::act(const std::vector<double>& state, bool explore) {
  return epsilon_greedy(q_values(state), explore ? epsilon_ : 0.0, rng_);
}

void DqnAgent::sync_target() { copy_parameters(online_.parameters(), target_.parameters()); }

void DqnAgent::observe(const std::vector<double>& state, int action, double reward,
                       const std::vector<double>& next_state, bool done) {
  replay_.push({scale(state), action, reward, scale(next_state), done}, episode_);
  ++steps_;
  const Hyperparams& hp = cfg_.hp;
  if (steps_ % hp.train_every != 0 || replay_.size() < static_cast<std::size_t>(hp.batch)) {
    return;
  }
  record_loss(dqn_update(online_, target(), opt_, replay_.sample(hp.batch, rng_), hp.gamma));
  if (hp.target_net && updates_ % hp.target_sync == 0) sync_target();
}

// ---------------------------------------------------------------------------

DrqnAgent::DrqnAgent(const AgentConfig& cfg)
    : Agent(cfg), replay_(static_cast<std::size_t>(cfg.hp.replay_capacity)) {
  Rng rng = init_rng(cfg);
  online_ = RecurrentQNet(tag(cfg) + ".q", 2 * cfg.clusters + 2, cfg.hp.hidden, actions(),
                          cfg.variant.algo == Algorithm::kBiDrqn, gcn_clusters(cfg),
                          cfg.hp.gcn_features, rng);
  target_ = online_;
  opt_ = nn::Adam(online_.parameters(), adam(cfg.hp.lr, cfg.hp));
}

void DrqnAgent::begin_episode() {
  window_.clear();
  h_ = Tensor::matrix(1, online_.fwd.hidden());
  c_ = h_;
}

int DrqnAgent::act(const std::vector<double>& state, bool explore) {
  std::vector<double> q;
  if (online_.bidirectional()) {
    window_.push_back(scale(state));
    while (static_cast<int>(window_.size()) > cfg_.hp.seq_len) window_.pop_front();
    std::vector<Tensor> steps;
    steps.reserve(window_.size());
    for (const auto& s : window_) steps.push_back(Tensor::row(s));
    Tape t(false);
    q = first_row(t.value(online_.forward(t, steps).back()));
  } else {
    if (h_.size() == 0) begin_episode();
    Tape t(false);
    nn::LstmState last;
    const std::vector<Var> out =
        online_.forward_from(t, {Tensor::row(scale(state))}, h_, c_, &last);
    q = first_row(t.value(out.back()));
    h_ = t.value(last.h);
    c_ = t.value(last.c);
  }
  return epsilon_greedy(q, explore ? epsilon_ : 0.0, rng_);
}

void DrqnAgent::sync_target() { copy_parameters(online_.parameters(), target_.parameters()); }

void DrqnAgent::observe(const std::vector<double>& state, int action, double reward,
                        const std::vector<double>& next_state, bool done) {
  replay_.push({scale(state), action, reward, scale(next_state), done}, episode_);
  ++steps_;
  const Hyperparams& hp = cfg_.hp;
  if (steps_ % hp.train_every != 0 || replay_.size() < static_cast<std::size_t>(hp.batch)) {
    return;
  }
  const int count = std::max(1, hp.batch / hp.seq_len);
  RecurrentQNet& tgt = hp.target_net ? target_ : online_;
  record_loss(drqn_update(online_, tgt, opt_, replay_.sample_sequences(count, hp.seq_len, rng_),
                          hp.burn_in, hp.gamma));
  if (hp.target_net && updates_ % hp.target_sync == 0) sync_target();
}

// ---------------------------------------------------------------------------

PpoAgent::PpoAgent(const AgentConfig& cfg) : Agent(cfg) {
  Rng rng = init_rng(cfg);
  const int width = 2 * cfg.clusters + 2;
  const std::vector<int> hidden = {cfg.hp.hidden, cfg.hp.hidden};
  actor_ = MlpNet(tag(cfg) + ".actor", width, hidden, actions(), nn::Activation::kTanh,
                  gcn_clusters(cfg), cfg.hp.gcn_features, rng);
  critic_ = MlpNet(tag(cfg) + ".critic", width, hidden, 1, nn::Activation::kTanh,
                   gcn_clusters(cfg), cfg.hp.gcn_features, rng);
  actor_opt_ = nn::Adam(actor_.parameters(), adam(cfg.hp.actor_lr, cfg.hp));
  critic_opt_ = nn::Adam(critic_.parameters(), adam(cfg.hp.critic_lr, cfg.hp));
  epsilon_ = 0.0;  // PPO explores through its own sampling
}

std::vector<Parameter*> PpoAgent::parameters() {
  std::vector<Parameter*> ps = actor_.parameters();
  for (Parameter* p : critic_.parameters()) ps.push_back(p);
  return ps;
}

std::vector<double> PpoAgent::probabilities(const std::vector<double>& state) {
  Tape t(false);
  const Tensor& logp =
      t.value(nn::log_softmax(t, actor_.forward(t, Tensor::row(scale(state)))));
  std::vector<double> p(logp.size());
  for (std::size_t a = 0; a < p.size(); ++a) p[a] = std::exp(logp[a]);
  return p;
}

double PpoAgent::value(const std::vector<double>& scaled) {
  Tape t(false);
  return t.value(critic_.forward(t, Tensor::row(scaled)))[0];
}

int PpoAgent::act(const std::vector<double>& state, bool explore) {
  const std::vector<double> p = probabilities(state);
  int a = 0;
  if (explore) {
    const double u = rng_.uniform();
    double acc = 0.0;
    a = static_cast<int>(p.size()) - 1;
    for (std::size_t k = 0; k < p.size(); ++k) {
      acc += p[k];
      if (u < acc) {
        a = static_cast<int>(k);
        break;
      }
    }
  } else {
    a = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  }
  pending_log_prob_ = std::log(std::max(p[a], 1e-300));
  pending_value_ = value(scale(state));
  return a;
}

void PpoAgent::observe(const std::vector<double>& state, int action, double reward,
                       const std::vector<double>& next_state, bool done) {
  rollout_.states.push_back(scale(state));
  rollout_.actions.push_back(action);
  rollout_.log_probs.push_back(pending_log_prob_);
  rollout_.values.push_back(pending_value_);
  rollout_.rewards.push_back(reward);
  rollout_.dones.push_back(done ? 1 : 0);
  if (static_cast<int>(rollout_.size()) < cfg_.hp.update_interval) return;
  rollout_.last_value = done ? 0.0 : value(scale(next_state));
  stats_ = ppo_update(actor_, critic_, actor_opt_, critic_opt_, rollout_, cfg_.hp);
  record_loss(stats_.policy_loss + stats_.value_loss);
  rollout_.clear();
}

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg) {
  switch (cfg.variant.algo) {
    case Algorithm::kDqn: return std::make_unique<DqnAgent>(cfg);
    case Algorithm::kDrqn:
    case Algorithm::kBiDrqn: return std::make_unique<DrqnAgent>(cfg);
    case Algorithm::kPpo: return std::make_unique<PpoAgent>(cfg);
  }
  throw ConfigError("make_agent: unknown algorithm");
}

}  // namespace nanogrid::agents
