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

#ifndef NANOGRID_AGENTS_REPLAY_HPP_
#define NANOGRID_AGENTS_REPLAY_HPP_

#include <cstddef>
#include <vector>

#include "nanogrid/rng.hpp"

namespace nanogrid::agents {

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// Fixed-capacity ring of transitions, oldest overwritten first. Each
// transition is tagged with the episode it came from so that sequence
// samples never straddle a reset.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t, long episode);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  // Logical index, 0 = oldest stored.
  const Transition& at(std::size_t i) const { return items_[slot(i)].t; }
  long episode_at(std::size_t i) const { return items_[slot(i)].episode; }

  // Uniform with replacement. ContractError when empty.
  std::vector<const Transition*> sample(int n, Rng& rng) const;
  // `count` runs of `len` consecutive transitions from one episode each.
  // ContractError when no such run is stored.
  std::vector<std::vector<const Transition*>> sample_sequences(int count, int len,
                                                               Rng& rng) const;

 private:
  struct Item {
    Transition t;
    long episode;
  };
  std::size_t slot(std::size_t i) const {
    return items_.size() < capacity_ ? i : (head_ + i) % capacity_;
  }

  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Item> items_;
};

}  // namespace nanogrid::agents

#endif  // NANOGRID_AGENTS_REPLAY_HPP_
