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

#ifndef NANOGRID_NN_LAYERS_HPP_
#define NANOGRID_NN_LAYERS_HPP_

#include <string>
#include <vector>

#include "nanogrid/nn/tape.hpp"
#include "nanogrid/rng.hpp"

namespace nanogrid::nn {

// Glorot-uniform fill for a fan_in -> fan_out weight.
Tensor glorot(const std::vector<int>& shape, int fan_in, int fan_out, Rng& rng);

// Layers own their Parameters. bind() puts them on a tape once so that an
// unrolled recurrence reuses a single leaf per parameter.

struct DenseVars {
  Var w, b;
  Activation act = Activation::kNone;
};

struct Dense {
  Parameter w;  // out x in
  Parameter b;  // 1 x out
  Activation act = Activation::kNone;

  Dense() = default;
  Dense(const std::string& name, int in, int out, Activation act, Rng& rng);

  int in() const { return w.value.cols(); }
  int out() const { return w.value.rows(); }
  DenseVars bind(Tape& t) { return {t.param(w), t.param(b), act}; }
  std::vector<Parameter*> parameters() { return {&w, &b}; }
};

// y = act(x W^T + b); x is batch x in.
Var dense_apply(Tape& t, Var x, const DenseVars& layer);
Var dense_apply(Tape& t, Var x, Dense& layer);

struct LstmVars {
  Var w, b;
  int hidden = 0;
};

// Gates are packed i, f, g, o along the 4H rows of w, which acts on the
// concatenation [x, h_prev]. The forget bias starts at 1.
struct LstmCell {
  Parameter w;  // 4H x (in + H)
  Parameter b;  // 1 x 4H

  LstmCell() = default;
  LstmCell(const std::string& name, int in, int hidden, Rng& rng);

  int hidden() const { return b.value.cols() / 4; }
  int in() const { return w.value.cols() - hidden(); }
  LstmVars bind(Tape& t) { return {t.param(w), t.param(b), hidden()}; }
  std::vector<Parameter*> parameters() { return {&w, &b}; }
};

struct LstmState {
  Var h, c;
};

LstmState lstm_zero_state(Tape& t, int batch, int hidden);
LstmState lstm_step(Tape& t, Var x, const LstmState& prev, const LstmVars& cell);
// Hidden outputs for every step of xs (each batch x in), starting at `init`.
std::vector<Var> lstm_unroll(Tape& t, const std::vector<Var>& xs,
                             const LstmVars& cell, LstmState init);
// Per-step [h_fwd, h_bwd], width 2H. Both directions start from zeros.
std::vector<Var> bilstm_apply(Tape& t, const std::vector<Var>& xs,
                              const LstmVars& fwd, const LstmVars& bwd);

struct GraphConvVars {
  Var w;
  Activation act = Activation::kNone;
};

struct GraphConv {
  Parameter w;  // F x out
  Activation act = Activation::kNone;

  GraphConv() = default;
  GraphConv(const std::string& name, int features, int out, Activation act,
            Rng& rng);

  GraphConvVars bind(Tape& t) { return {t.param(w), act}; }
  std::vector<Parameter*> parameters() { return {&w}; }
};

// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
Tensor normalized_adjacency(const Tensor& adjacency);
Tensor fully_connected_adjacency(int k);

// x stacks B graphs of K node rows (B*K x F); `op` is a K x K normalized
// operator. Returns act(op X W) per graph.
Var gcn_apply(Tape& t, Var x, const Tensor& op, const GraphConvVars& layer);
// Single graph with a raw adjacency.
Var gcn_apply(Tape& t, Var x, const Tensor& adjacency, GraphConv& layer);

}  // namespace nanogrid::nn

#endif  // NANOGRID_NN_LAYERS_HPP_
