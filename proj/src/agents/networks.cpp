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

#include "nanogrid/agents/networks.hpp"

#include "nanogrid/errors.hpp"

namespace nanogrid::agents {

Tensor node_features(const Tensor& states, int clusters) {
  const int batch = states.rows();
  if (states.cols() != 2 * clusters + 2) {
    throw ContractError("node_features: state width " + std::to_string(states.cols()) +
                        " does not match " + std::to_string(clusters) + " clusters");
  }
  Tensor x = Tensor::matrix(batch * clusters, 4);
  for (int b = 0; b < batch; ++b) {
    for (int i = 0; i < clusters; ++i) {
      const int r = b * clusters + i;
      x.at(r, 0) = states.at(b, i);
      x.at(r, 1) = states.at(b, clusters + i);
      x.at(r, 2) = states.at(b, 2 * clusters);
      x.at(r, 3) = states.at(b, 2 * clusters + 1);
    }
  }
  return x;
}

GcnEncoder::GcnEncoder(const std::string& name, int k, int features, Rng& rng)
    : clusters(k),
      conv(name + ".gcn", 4, features, nn::Activation::kRelu, rng),
      op(nn::normalized_adjacency(nn::fully_connected_adjacency(k))) {}

Var GcnEncoder::nodes(Tape& t, const Tensor& states) {
  const Var x = t.constant(node_features(states, clusters));
  return nn::gcn_apply(t, x, op, conv.bind(t));
}

Var GcnEncoder::encode(Tape& t, const Tensor& states) {
  return nn::reshape(t, nodes(t, states), {states.rows(), width()});
}

std::vector<double> gcn_encode(GcnEncoder& encoder, const MarketState& state) {
  if (static_cast<int>(state.demand_kw.size()) != encoder.clusters ||
      state.supply_kw.size() != state.demand_kw.size()) {
    throw ContractError("gcn_encode: state has " +
                        std::to_string(state.demand_kw.size()) +
                        " clusters, encoder expects " +
                        std::to_string(encoder.clusters));
  }
  Tape t(false);
  const Var e = encoder.encode(t, Tensor::row(state.flatten()));
  return t.value(e).values();
}

MlpNet::MlpNet(const std::string& name, int state_size, const std::vector<int>& hidden,
               int outputs, nn::Activation act, std::optional<int> gcn_clusters,
               int gcn_features, Rng& rng) {
  int width = state_size;
  if (gcn_clusters) {
    encoder.emplace(name, *gcn_clusters, gcn_features, rng);
    width = encoder->width();
  }
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    layers.emplace_back(name + ".fc" + std::to_string(i), width, hidden[i], act, rng);
    width = hidden[i];
  }
  layers.emplace_back(name + ".head", width, outputs, nn::Activation::kNone, rng);
}

Var MlpNet::forward(Tape& t, const Tensor& states) {
  Var x = encoder ? encoder->encode(t, states) : t.constant(states);
  for (nn::Dense& layer : layers) x = nn::dense_apply(t, x, layer);
  return x;
}

std::vector<Parameter*> MlpNet::parameters() {
  std::vector<Parameter*> out;
  if (encoder) out = encoder->parameters();
  for (nn::Dense& layer : layers) {
    for (Parameter* p : layer.parameters()) out.push_back(p);
  }
  return out;
}

RecurrentQNet::RecurrentQNet(const std::string& name, int state_size, int hidden,
                             int outputs, bool bidirectional,
                             std::optional<int> gcn_clusters, int gcn_features,
                             Rng& rng) {
  int width = state_size;
  if (gcn_clusters) {
    encoder.emplace(name, *gcn_clusters, gcn_features, rng);
    width = encoder->width();
  }
  in = nn::Dense(name + ".in", width, hidden, nn::Activation::kRelu, rng);
  const int cell = bidirectional ? hidden / 2 : hidden;
  if (cell < 1) throw ConfigError("RecurrentQNet: hidden width too small");
  fwd = nn::LstmCell(name + ".lstm_fwd", hidden, cell, rng);
  if (bidirectional) bwd.emplace(name + ".lstm_bwd", hidden, cell, rng);
  out = nn::Dense(name + ".head", bidirectional ? 2 * cell : cell, outputs,
                  nn::Activation::kNone, rng);
}

std::vector<Var> RecurrentQNet::forward(Tape& t, const std::vector<Tensor>& steps) {
  if (steps.empty()) throw ContractError("RecurrentQNet: empty sequence");
  if (!bwd) {
    const Tensor zero = Tensor::matrix(steps[0].rows(), fwd.hidden());
    return forward_from(t, steps, zero, zero);
  }
  const nn::DenseVars in_vars = in.bind(t);
  std::vector<Var> xs;
  xs.reserve(steps.size());
  for (const Tensor& s : steps) {
    const Var x = encoder ? encoder->encode(t, s) : t.constant(s);
    xs.push_back(nn::dense_apply(t, x, in_vars));
  }
  const std::vector<Var> hs = nn::bilstm_apply(t, xs, fwd.bind(t), bwd->bind(t));
  const nn::DenseVars out_vars = out.bind(t);
  std::vector<Var> q;
  q.reserve(hs.size());
  for (Var h : hs) q.push_back(nn::dense_apply(t, h, out_vars));
  return q;
}

std::vector<Var> RecurrentQNet::forward_from(Tape& t, const std::vector<Tensor>& steps,
                                             const Tensor& h0, const Tensor& c0,
                                             nn::LstmState* last) {
  if (bwd) throw ContractError("RecurrentQNet: forward_from on a bidirectional net");
  if (steps.empty()) throw ContractError("RecurrentQNet: empty sequence");
  const nn::DenseVars in_vars = in.bind(t);
  const nn::LstmVars cell = fwd.bind(t);
  const nn::DenseVars out_vars = out.bind(t);
  nn::LstmState state{t.constant(h0), t.constant(c0)};
  std::vector<Var> q;
  q.reserve(steps.size());
  for (const Tensor& s : steps) {
    const Var x = encoder ? encoder->encode(t, s) : t.constant(s);
    state = nn::lstm_step(t, nn::dense_apply(t, x, in_vars), state, cell);
    q.push_back(nn::dense_apply(t, state.h, out_vars));
  }
  if (last != nullptr) *last = state;
  return q;
}

std::vector<Parameter*> RecurrentQNet::parameters() {
  std::vector<Parameter*> ps;
  if (encoder) ps = encoder->parameters();
  auto append = [&ps](std::vector<Parameter*> more) {
    ps.insert(ps.end(), more.begin(), more.end());
  };
  append(in.parameters());
  append(fwd.parameters());
  if (bwd) append(bwd->parameters());
  append(out.parameters());
  return ps;
}

void copy_parameters(const std::vector<Parameter*>& from,
                     const std::vector<Parameter*>& to) {
  if (from.size() != to.size()) {
    throw ContractError("copy_parameters: parameter counts differ");
  }
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!from[i]->value.same_shape(to[i]->value)) {
      throw ContractError("copy_parameters: shape mismatch at " + from[i]->name);
    }
    to[i]->value = from[i]->value;
  }
}

}  // namespace nanogrid::agents
