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

#ifndef NANOGRID_NN_TAPE_HPP_
#define NANOGRID_NN_TAPE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "nanogrid/nn/tensor.hpp"

namespace nanogrid::nn {

// A trainable array plus its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape(), 0.0) {}
  void zero_grad() { grad.fill(0.0); }
};

struct Var {
  int id = -1;
};

// Records a forward computation and replays it backwards once. Nodes are
// appended in creation order, which is a topological order, so backward
// walks them in reverse.
class Tape {
 public:
  using Backward = std::function<void(Tape&, int)>;

  // With gradients disabled nothing is kept for backward (inference).
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  Var constant(Tensor value);
  // Parameter leaf; backward adds into `p.grad`. The tape reads p.value in
  // place, so it must outlive the tape unchanged.
  Var param(Parameter& p);

  const Tensor& value(Var v) const;
  // Gradient of the last backward() target wrt v (zeros if unreached).
  const Tensor& grad(Var v);
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  // Seeds d(loss)/d(loss) = 1 and propagates. loss must hold one element.
  // A tape supports a single backward pass; a second call throws
  // ContractError.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  bool grad_enabled() const { return grad_enabled_; }

  // For op implementations.
  Var record(Tensor value, bool requires_grad, Backward backward);
  Tensor& grad_buffer(int id);
  const Tensor& value_of(int id) const { return value(Var{id}); }

 private:
  struct Node {
    Tensor value;
    const Tensor* ref = nullptr;  // parameter leaves read in place
    Tensor grad;
    Parameter* param = nullptr;
    bool requires_grad = false;
    Backward backward;
  };

  std::vector<Node> nodes_;
  bool grad_enabled_;
  bool used_ = false;
};

enum class Activation { kNone, kRelu, kSigmoid, kTanh };

// Elementwise and linear-algebra ops. All throw ContractError on shape
// mismatch.
Var matmul(Tape& t, Var a, Var b);
// x * W^T + b with x (B x in), W (out x in), b (1 x out).
Var linear(Tape& t, Var x, Var w, Var b);
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
Var add_row(Tape& t, Var a, Var row);
Var scale(Tape& t, Var a, double c);
Var add_scalar(Tape& t, Var a, double c);
Var relu(Tape& t, Var a);
Var sigmoid(Tape& t, Var a);
Var tanh(Tape& t, Var a);
Var exp(Tape& t, Var a);
Var square(Tape& t, Var a);
Var activate(Tape& t, Var a, Activation act);
Var concat_cols(Tape& t, const std::vector<Var>& parts);
Var slice_cols(Tape& t, Var a, int start, int width);
Var sum(Tape& t, Var a);
Var mean(Tape& t, Var a);
// out[r] = a[r, index[r]], shape rows x 1.
Var gather_cols(Tape& t, Var a, const std::vector<int>& index);
Var log_softmax(Tape& t, Var a);
// Gradient flows only where lo < a < hi.
Var clamp(Tape& t, Var a, double lo, double hi);
// Elementwise minimum; ties send the gradient to `a`.
Var minimum(Tape& t, Var a, Var b);
Var reshape(Tape& t, Var a, const std::vector<int>& shape);
// x holds B stacked blocks of `op.rows()` rows; each block is left-multiplied
// by the constant square matrix `op`.
Var block_left_multiply(Tape& t, const Tensor& op, Var x);

}  // namespace nanogrid::nn

#endif  // NANOGRID_NN_TAPE_HPP_
