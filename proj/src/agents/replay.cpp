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

#include "nanogrid/agents/replay.hpp"

#include "nanogrid/errors.hpp"

namespace nanogrid::agents {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ContractError("ReplayBuffer: capacity must be positive");
  items_.reserve(capacity);
}

void ReplayBuffer::push(Transition t, long episode) {
  if (items_.size() < capacity_) {
    items_.push_back({std::move(t), episode});
    return;
  }
  items_[head_] = {std::move(t), episode};
  head_ = (head_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(int n, Rng& rng) const {
  if (items_.empty()) throw ContractError("ReplayBuffer: sample from empty buffer");
  std::vector<const Transition*> out;
  out.reserve(n);
  const int last = static_cast<int>(items_.size()) - 1;
  for (int k = 0; k < n; ++k) out.push_back(&at(rng.uniform_int(0, last)));
  return out;
}

std::vector<std::vector<const Transition*>> ReplayBuffer::sample_sequences(
    int count, int len, Rng& rng) const {
  if (len < 1) throw ContractError("ReplayBuffer: sequence length must be >= 1");
  // Episodes are pushed contiguously, so equal tags at both ends mean the
  // whole run belongs to one episode.
  std::vector<std::size_t> starts;
  const std::size_t n = items_.size();
  for (std::size_t i = 0; i + len <= n; ++i) {
    if (episode_at(i) == episode_at(i + len - 1)) starts.push_back(i);
  }
  if (starts.empty()) {
    throw ContractError("ReplayBuffer: no stored run of " + std::to_string(len) +
                        " steps within one episode");
  }
  std::vector<std::vector<const Transition*>> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const std::size_t s =
        starts[rng.uniform_int(0, static_cast<int>(starts.size()) - 1)];
    std::vector<const Transition*> seq;
    seq.reserve(len);
    for (int j = 0; j < len; ++j) seq.push_back(&at(s + j));
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace nanogrid::agents
