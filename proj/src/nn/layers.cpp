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

#include "nanogrid/nn/layers.hpp"

#include <cmath>

#include "nanogrid/errors.hpp"

namespace nanogrid::nn {

Tensor glorot(const std::vector<int>& shape, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w(shape);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-limit, limit);
  return w;
}

Dense::Dense(const std::string& name, int in, int out, Activation a, Rng& rng)
    : w(name + ".w", glorot({out, in}, in, out, rng)),
      b(name + ".b", Tensor::matrix(1, out)),
      act(a) {}

Var dense_apply(Tape& t, Var x, const DenseVars& layer) {
  const Tensor& W = t.value(layer.w);
  if (t.value(x).cols() != W.cols()) {
    throw ContractError("dense_apply: input width " +
                        std::to_string(t.value(x).cols()) + ", layer expects " +
                        std::to_string(W.cols()));
  }
  return activate(t, linear(t, x, layer.w, layer.b), layer.act);
}

Var dense_apply(Tape& t, Var x, Dense& layer) {
  return dense_apply(t, x, layer.bind(t));
}

LstmCell::LstmCell(const std::string& name, int in, int hidden, Rng& rng)
    : w(name + ".w", glorot({4 * hidden, in + hidden}, in + hidden, hidden, rng)),
      b(name + ".b", Tensor::matrix(1, 4 * hidden)) {
  for (int j = hidden; j < 2 * hidden; ++j) b.value[j] = 1.0;
}

LstmState lstm_zero_state(Tape& t, int batch, int hidden) {
  return {t.constant(Tensor::matrix(batch, hidden)),
          t.constant(Tensor::matrix(batch, hidden))};
}

LstmState lstm_step(Tape& t, Var x, const LstmState& prev, const LstmVars& cell) {
  const int H = cell.hidden;
  const Tensor& W = t.value(cell.w);
  const Tensor& h = t.value(prev.h);
  const Tensor& c = t.value(prev.c);
  if (h.cols() != H || c.cols() != H || h.rows() != t.value(x).rows() ||
      !h.same_shape(c) || t.value(x).cols() + H != W.cols()) {
    throw ContractError("lstm_step: x " + t.value(x).shape_string() + ", h " +
                        h.shape_string() + ", c " + c.shape_string() +
                        " against weights " + W.shape_string());
  }
  const Var z = linear(t, concat_cols(t, {x, prev.h}), cell.w, cell.b);
  const Var i = sigmoid(t, slice_cols(t, z, 0, H));
  const Var f = sigmoid(t, slice_cols(t, z, H, H));
  const Var g = tanh(t, slice_cols(t, z, 2 * H, H));
  const Var o = sigmoid(t, slice_cols(t, z, 3 * H, H));
  const Var c_next = add(t, mul(t, f, prev.c), mul(t, i, g));
  const Var h_next = mul(t, o, tanh(t, c_next));
  return {h_next, c_next};
}

std::vector<Var> lstm_unroll(Tape& t, const std::vector<Var>& xs,
                             const LstmVars& cell, LstmState init) {
  std::vector<Var> out;
  out.reserve(xs.size());
  for (Var x : xs) {
    init = lstm_step(t, x, init, cell);
    out.push_back(init.h);
  }
  return out;
}

std::vector<Var> bilstm_apply(Tape& t, const std::vector<Var>& xs,
                              const LstmVars& fwd, const LstmVars& bwd) {
  if (xs.empty()) throw ContractError("bilstm_apply: empty sequence");
  const int batch = t.value(xs[0]).rows();
  const std::vector<Var> hf =
      lstm_unroll(t, xs, fwd, lstm_zero_state(t, batch, fwd.hidden));
  const std::vector<Var> reversed(xs.rbegin(), xs.rend());
  const std::vector<Var> hb =
      lstm_unroll(t, reversed, bwd, lstm_zero_state(t, batch, bwd.hidden));
  std::vector<Var> out;
  out.reserve(xs.size());
  const std::size_t n = xs.size();
  for (std::size_t s = 0; s < n; ++s) {
    out.push_back(concat_cols(t, {hf[s], hb[n - 1 - s]}));
  }
  return out;
}

GraphConv::GraphConv(const std::string& name, int features, int out,
                     Activation a, Rng& rng)
    : w(name + ".w", glorot({features, out}, features, out, rng)), act(a) {}

Tensor normalized_adjacency(const Tensor& adjacency) {
  const int k = adjacency.rows();
  if (adjacency.rank() != 2 || adjacency.cols() != k || k == 0) {
    throw ContractError("normalized_adjacency: adjacency must be square, got " +
                        adjacency.shape_string());
  }
  Tensor a_hat = adjacency;
  for (int i = 0; i < k; ++i) a_hat.at(i, i) += 1.0;
  std::vector<double> inv_sqrt(k);
  for (int i = 0; i < k; ++i) {
    const double deg = a_hat.mat().row(i).sum();
    if (!(deg > 0.0)) {
      throw DomainError("normalized_adjacency: non-positive degree at node " +
                        std::to_string(i));
    }
    inv_sqrt[i] = 1.0 / std::sqrt(deg);
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a_hat.at(i, j) *= inv_sqrt[i] * inv_sqrt[j];
  }
  return a_hat;
}

Tensor fully_connected_adjacency(int k) {
  Tensor a = Tensor::matrix(k, k, 1.0);
  for (int i = 0; i < k; ++i) a.at(i, i) = 0.0;
  return a;
}

Var gcn_apply(Tape& t, Var x, const Tensor& op, const GraphConvVars& layer) {
  const Tensor& W = t.value(layer.w);
  if (t.value(x).cols() != W.rows()) {
    throw ContractError("gcn_apply: node features " + t.value(x).shape_string() +
                        " against weights " + W.shape_string());
  }
  const Var xw = matmul(t, x, layer.w);
  return activate(t, block_left_multiply(t, op, xw), layer.act);
}

Var gcn_apply(Tape& t, Var x, const Tensor& adjacency, GraphConv& layer) {
  if (t.value(x).rows() != adjacency.rows()) {
    throw ContractError("gcn_apply: " + std::to_string(t.value(x).rows()) +
                        " node rows for a graph of " +
                        std::to_string(adjacency.rows()));
  }
  return gcn_apply(t, x, normalized_adjacency(adjacency), layer.bind(t));
}

}  // namespace nanogrid::nn
