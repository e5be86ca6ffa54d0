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
namespace {

Tensor stack(const std::vector<const Transition*>& batch, bool next) {
  const int cols = static_cast<int>(batch[0]->state.size());
  Tensor s = Tensor::matrix(static_cast<int>(batch.size()), cols);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const std::vector<double>& v = next ? batch[b]->next_state : batch[b]->state;
    if (static_cast<int>(v.size()) != cols) {
      throw ContractError("replay batch: inconsistent state widths");
    }
    std::copy(v.begin(), v.end(), s.data() + b * cols);
  }
  return s;
}

double row_max(const Tensor& q, int r) { return q.mat().row(r).maxCoeff(); }

void check_finite(double loss, const char* what) {
  if (!std::isfinite(loss)) {
    throw std::runtime_error(std::string(what) + ": non-finite loss");
  }
}

}  // namespace

int epsilon_greedy(const std::vector<double>& q, double epsilon, Rng& rng) {
  if (q.empty()) throw ContractError("epsilon_greedy: no actions");
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return rng.uniform_int(0, static_cast<int>(q.size()) - 1);
  }
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

double dqn_update(MlpNet& online, MlpNet& target, nn::Adam& opt,
                  const std::vector<const Transition*>& batch, double gamma) {
  if (batch.empty()) throw ContractError("dqn_update: empty batch");
  const int n = static_cast<int>(batch.size());
  Tensor y = Tensor::matrix(n, 1);
  {
    Tape t(false);
    const Tensor& q_next = t.value(target.forward(t, stack(batch, true)));
    for (int b = 0; b < n; ++b) {
      y.at(b, 0) = batch[b]->reward + (batch[b]->done ? 0.0 : gamma * row_max(q_next, b));
    }
  }
  std::vector<int> actions(n);
  for (int b = 0; b < n; ++b) actions[b] = batch[b]->action;

  Tape t;
  const Var q = online.forward(t, stack(batch, false));
  const Var diff = nn::sub(t, nn::gather_cols(t, q, actions), t.constant(std::move(y)));
  const Var loss = nn::mean(t, nn::square(t, diff));
  const double value = t.value(loss)[0];
  check_finite(value, "dqn_update");
  t.backward(loss);
  opt.step();
  return value;
}

double drqn_update(RecurrentQNet& online, RecurrentQNet& target, nn::Adam& opt,
                   const std::vector<std::vector<const Transition*>>& sequences,
                   int burn_in, double gamma) {
  if (sequences.empty()) throw ContractError("drqn_update: empty batch");
  const int len = static_cast<int>(sequences[0].size());
  if (burn_in < 0 || burn_in >= len) {
    throw ContractError("drqn_update: burn-in must leave at least one trained step");
  }
  for (const auto& seq : sequences) {
    if (static_cast<int>(seq.size()) != len) {
      throw ContractError("drqn_update: sequences of different lengths");
    }
    for (int j = 0; j + 1 < len; ++j) {
      if (seq[j]->done) {
        throw ContractError("drqn_update: sequence crosses an episode boundary");
      }
    }
  }
  const int n = static_cast<int>(sequences.size());
  std::vector<Tensor> states, next_states;
  for (int j = 0; j < len; ++j) {
    std::vector<const Transition*> column(n);
    for (int b = 0; b < n; ++b) column[b] = sequences[b][j];
    states.push_back(stack(column, false));
    next_states.push_back(stack(column, true));
  }

  std::vector<Tensor> targets;
  {
    Tape t(false);
    const std::vector<Var> q_next = target.forward(t, next_states);
    for (int j = burn_in; j < len; ++j) {
      const Tensor& qn = t.value(q_next[j]);
      Tensor y = Tensor::matrix(n, 1);
      for (int b = 0; b < n; ++b) {
        const Transition& tr = *sequences[b][j];
        y.at(b, 0) = tr.reward + (tr.done ? 0.0 : gamma * row_max(qn, b));
      }
      targets.push_back(std::move(y));
    }
  }

  // A unidirectional net warms its state on a gradient-free tape and trains
  // from that state; the bidirectional net needs the whole window in one
  // graph because its backward pass reads the trained steps first.
  Tape t;
  std::vector<Var> q;
  if (!online.bidirectional() && burn_in > 0) {
    Tape warm(false);
    nn::LstmState last;
    const std::vector<Tensor> prefix(states.begin(), states.begin() + burn_in);
    const Tensor zero = Tensor::matrix(n, online.fwd.hidden());
    online.forward_from(warm, prefix, zero, zero, &last);
    const std::vector<Tensor> suffix(states.begin() + burn_in, states.end());
    q.assign(burn_in, Var{});
    for (Var v : online.forward_from(t, suffix, warm.value(last.h), warm.value(last.c))) {
      q.push_back(v);
    }
  } else {
    q = online.forward(t, states);
  }
  Var total{};
  for (int j = burn_in; j < len; ++j) {
    std::vector<int> actions(n);
    for (int b = 0; b < n; ++b) actions[b] = sequences[b][j]->action;
    const Var diff = nn::sub(t, nn::gather_cols(t, q[j], actions),
                             t.constant(std::move(targets[j - burn_in])));
    const Var step_loss = nn::mean(t, nn::square(t, diff));
    total = j == burn_in ? step_loss : nn::add(t, total, step_loss);
  }
  const Var loss = nn::scale(t, total, 1.0 / (len - burn_in));
  const double value = t.value(loss)[0];
  check_finite(value, "drqn_update");
  t.backward(loss);
  opt.step();
  return value;
}

}  // namespace nanogrid::agents
