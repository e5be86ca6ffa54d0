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

#ifndef NANOGRID_AGENTS_NETWORKS_HPP_
#define NANOGRID_AGENTS_NETWORKS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "nanogrid/env.hpp"
#include "nanogrid/nn/layers.hpp"

namespace nanogrid::agents {

using nn::Parameter;
using nn::Tape;
using nn::Tensor;
using nn::Var;

// Per-node features [D_i, S_i, DR, SMP] for every row of a batch of flat
// states [D_1..D_K, S_1..S_K, DR, SMP]. Output is (B*K) x 4, node-major
// within each batch row.
Tensor node_features(const Tensor& states, int clusters);

// One graph-convolution layer over the fully connected cluster graph.
struct GcnEncoder {
  int clusters = 0;
  nn::GraphConv conv;
  Tensor op;  // normalized adjacency

  GcnEncoder() = default;
  GcnEncoder(const std::string& name, int clusters, int features, Rng& rng);

  int width() const { return clusters * conv.w.value.cols(); }
  // (B*K) x F node embeddings before flattening.
  Var nodes(Tape& t, const Tensor& states);
  // B x (K*F).
  Var encode(Tape& t, const Tensor& states);
  std::vector<Parameter*> parameters() { return conv.parameters(); }
};

// Flattened embedding of a single state. ContractError when the state's
// cluster count differs from the encoder's.
std::vector<double> gcn_encode(GcnEncoder& encoder, const MarketState& state);

// Dense stack, optionally behind a GCN front.
struct MlpNet {
  std::optional<GcnEncoder> encoder;
  std::vector<nn::Dense> layers;

  MlpNet() = default;
  MlpNet(const std::string& name, int state_size, const std::vector<int>& hidden,
         int outputs, nn::Activation act, std::optional<int> gcn_clusters,
         int gcn_features, Rng& rng);

  Var forward(Tape& t, const Tensor& states);
  std::vector<Parameter*> parameters();
};

// dense -> LSTM (or BiLSTM) -> dense, optionally behind a GCN front.
struct RecurrentQNet {
  std::optional<GcnEncoder> encoder;
  nn::Dense in;
  nn::LstmCell fwd;
  std::optional<nn::LstmCell> bwd;
  nn::Dense out;

  RecurrentQNet() = default;
  // `hidden` is the LSTM width; a bidirectional net splits it in two halves.
  RecurrentQNet(const std::string& name, int state_size, int hidden, int outputs,
                bool bidirectional, std::optional<int> gcn_clusters,
                int gcn_features, Rng& rng);

  bool bidirectional() const { return bwd.has_value(); }
  // Q values per step (B x A each), hidden state starting from zeros.
  std::vector<Var> forward(Tape& t, const std::vector<Tensor>& steps);
  // Unidirectional only: starts from the given state and leaves the final
  // state in `last` when non-null.
  std::vector<Var> forward_from(Tape& t, const std::vector<Tensor>& steps,
                                const Tensor& h0, const Tensor& c0,
                                nn::LstmState* last = nullptr);
  std::vector<Parameter*> parameters();
};

void copy_parameters(const std::vector<Parameter*>& from,
                     const std::vector<Parameter*>& to);

}  // namespace nanogrid::agents

#endif  // NANOGRID_AGENTS_NETWORKS_HPP_
