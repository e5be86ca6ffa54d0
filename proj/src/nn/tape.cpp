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

#include "nanogrid/nn/tape.hpp"

#include <cassert>
#include <cmath>

#include "nanogrid/errors.hpp"

namespace nanogrid::nn {
namespace {

[[noreturn]] void fail(const std::string& what) { throw ContractError(what); }

std::string shapes(const Tensor& a, const Tensor& b) {
  return a.shape_string() + " vs " + b.shape_string();
}

// Elementwise op whose derivative is expressed through the input x and
// output y.
template <typename F, typename D>
Var unary(Tape& t, Var a, F f, D dfdx) {
  const Tensor& x = t.value(a);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return t.record(std::move(y), t.requires_grad(a), [a, dfdx](Tape& tp, int self) {
    const Tensor& g = tp.grad_buffer(self);
    const Tensor& xv = tp.value(a);
    const Tensor& yv = tp.value_of(self);
    Tensor& ga = tp.grad_buffer(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * dfdx(xv[i], yv[i]);
  });
}

}  // namespace

Var Tape::record(Tensor value, bool requires_grad, Backward backward) {
#ifndef NDEBUG
  assert(value.all_finite() && "non-finite value recorded on tape");
#endif
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad && grad_enabled_;
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::constant(Tensor value) { return record(std::move(value), false, {}); }

Var Tape::param(Parameter& p) {
  Node n;
  n.ref = &p.value;
  n.param = &p;
  n.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tensor& Tape::value(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.ref != nullptr ? *n.ref : n.value;
}

Tensor& Tape::grad_buffer(int id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0 && value(Var{id}).size() != 0) {
    n.grad = Tensor(value(Var{id}).shape(), 0.0);
  }
  return n.grad;
}

const Tensor& Tape::grad(Var v) { return grad_buffer(v.id); }

void Tape::backward(Var loss) {
  if (used_) fail("tape: backward() called twice on the same tape");
  if (!grad_enabled_) fail("tape: backward() on a tape with gradients disabled");
  if (value(loss).size() != 1) fail("tape: backward() target must be a scalar");
  used_ = true;
  grad_buffer(loss.id)[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) n.param->grad.mat() += n.grad.mat();
  }
}

Var matmul(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  if (A.cols() != B.rows()) fail("matmul: " + shapes(A, B));
  Tensor y = Tensor::matrix(A.rows(), B.cols());
  y.mat().noalias() = A.mat() * B.mat();
  return t.record(std::move(y), t.requires_grad(a) || t.requires_grad(b),
                  [a, b](Tape& tp, int self) {
                    const Tensor& g = tp.grad_buffer(self);
                    if (tp.requires_grad(a)) {
                      tp.grad_buffer(a.id).mat().noalias() +=
                          g.mat() * tp.value(b).mat().transpose();
                    }
                    if (tp.requires_grad(b)) {
                      tp.grad_buffer(b.id).mat().noalias() +=
                          tp.value(a).mat().transpose() * g.mat();
                    }
                  });
}

Var linear(Tape& t, Var x, Var w, Var b) {
  const Tensor& X = t.value(x);
  const Tensor& W = t.value(w);
  const Tensor& bias = t.value(b);
  if (X.cols() != W.cols()) fail("linear: input " + shapes(X, W));
  if (bias.rows() != 1 || bias.cols() != W.rows()) {
    fail("linear: bias " + shapes(bias, W));
  }
  Tensor y = Tensor::matrix(X.rows(), W.rows());
  y.mat().noalias() = X.mat() * W.mat().transpose();
  y.mat().rowwise() += bias.mat().row(0);
  const bool rg = t.requires_grad(x) || t.requires_grad(w) || t.requires_grad(b);
  return t.record(std::move(y), rg, [x, w, b](Tape& tp, int self) {
    const Tensor& g = tp.grad_buffer(self);
    if (tp.requires_grad(x)) {
      tp.grad_buffer(x.id).mat().noalias() += g.mat() * tp.value(w).mat();
    }
    if (tp.requires_grad(w)) {
      tp.grad_buffer(w.id).mat().noalias() +=
          g.mat().transpose() * tp.value(x).mat();
    }
    if (tp.requires_grad(b)) {
      tp.grad_buffer(b.id).mat().row(0) += g.mat().colwise().sum();
    }
  });
}

Var add(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  if (!A.same_shape(B)) fail("add: " + shapes(A, B));
  Tensor y = A;
  y.mat() += B.mat();
  return t.record(std::move(y), t.requires_grad(a) || t.requires_grad(b),
                  [a, b](Tape& tp, int self) {
                    const Tensor& g = tp.grad_buffer(self);
                    if (tp.requires_grad(a)) tp.grad_buffer(a.id).mat() += g.mat();
                    if (tp.requires_grad(b)) tp.grad_buffer(b.id).mat() += g.mat();
                  });
}

Var sub(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  if (!A.same_shape(B)) fail("sub: " + shapes(A, B));
  Tensor y = A;
  y.mat() -= B.mat();
  return t.record(std::move(y), t.requires_grad(a) || t.requires_grad(b),
                  [a, b](Tape& tp, int self) {
                    const Tensor& g = tp.grad_buffer(self);
                    if (tp.requires_grad(a)) tp.grad_buffer(a.id).mat() += g.mat();
                    if (tp.requires_grad(b)) tp.grad_buffer(b.id).mat() -= g.mat();
                  });
}

Var mul(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  if (!A.same_shape(B)) fail("mul: " + shapes(A, B));
  Tensor y = A;
  y.mat().array() *= B.mat().array();
  return t.record(std::move(y), t.requires_grad(a) || t.requires_grad(b),
                  [a, b](Tape& tp, int self) {
                    const Tensor& g = tp.grad_buffer(self);
                    if (tp.requires_grad(a)) {
                      tp.grad_buffer(a.id).mat().array() +=
                          g.mat().array() * tp.value(b).mat().array();
                    }
                    if (tp.requires_grad(b)) {
                      tp.grad_buffer(b.id).mat().array() +=
                          g.mat().array() * tp.value(a).mat().array();
                    }
                  });
}

Var add_row(Tape& t, Var a, Var row) {
  const Tensor& A = t.value(a);
  const Tensor& R = t.value(row);
  if (R.rows() != 1 || R.cols() != A.cols()) fail("add_row: " + shapes(A, R));
  Tensor y = A;
  y.mat().rowwise() += R.mat().row(0);
  return t.record(std::move(y), t.requires_grad(a) || t.requires_grad(row),
                  [a, row](Tape& tp, int self) {
                    const Tensor& g = tp.grad_buffer(self);
                    if (tp.requires_grad(a)) tp.grad_buffer(a.id).mat() += g.mat();
                    if (tp.requires_grad(row)) {
                      tp.grad_buffer(row.id).mat().row(0) += g.mat().colwise().sum();
                    }
                  });
}

Var scale(Tape& t, Var a, double c) {
  return unary(t, a, [c](double x) { return c * x; },
               [c](double, double) { return c; });
}

Var add_scalar(Tape& t, Var a, double c) {
  return unary(t, a, [c](double x) { return x + c; },
               [](double, double) { return 1.0; });
}

Var relu(Tape& t, Var a) {
  return unary(t, a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Tape& t, Var a) {
  return unary(t, a,
               [](double x) {
                 if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
                 const double e = std::exp(x);
                 return e / (1.0 + e);
               },
               [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Tape& t, Var a) {
  return unary(t, a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var exp(Tape& t, Var a) {
  return unary(t, a, [](double x) { return std::exp(x); },
               [](double, double y) { return y; });
}

Var square(Tape& t, Var a) {
  return unary(t, a, [](double x) { return x * x; },
               [](double x, double) { return 2.0 * x; });
}

Var activate(Tape& t, Var a, Activation act) {
  switch (act) {
    case Activation::kNone: return a;
    case Activation::kRelu: return relu(t, a);
    case Activation::kSigmoid: return sigmoid(t, a);
    case Activation::kTanh: return tanh(t, a);
  }
  return a;
}

Var concat_cols(Tape& t, const std::vector<Var>& parts) {
  if (parts.empty()) fail("concat_cols: no inputs");
  const int rows = t.value(parts[0]).rows();
  int cols = 0;
  bool rg = false;
  for (Var p : parts) {
    if (t.value(p).rows() != rows) fail("concat_cols: row counts differ");
    cols += t.value(p).cols();
    rg = rg || t.requires_grad(p);
  }
  Tensor y = Tensor::matrix(rows, cols);
  int offset = 0;
  for (Var p : parts) {
    const Tensor& P = t.value(p);
    y.mat().middleCols(offset, P.cols()) = P.mat();
    offset += P.cols();
  }
  return t.record(std::move(y), rg, [parts](Tape& tp, int self) {
    const Tensor& g = tp.grad_buffer(self);
    int off = 0;
    for (Var p : parts) {
      const int w = tp.value(p).cols();
      if (tp.requires_grad(p)) {
        tp.grad_buffer(p.id).mat() += g.mat().middleCols(off, w);
      }
      off += w;
    }
  });
}

Var slice_cols(Tape& t, Var a, int start, int width) {
  const Tensor& A = t.value(a);
  if (start < 0 || width < 0 || start + width > A.cols()) {
    fail("slice_cols: range out of bounds for " + A.shape_string());
  }
  Tensor y = Tensor::matrix(A.rows(), width);
  y.mat() = A.mat().middleCols(start, width);
  return t.record(std::move(y), t.requires_grad(a),
                  [a, start, width](Tape& tp, int self) {
                    tp.grad_buffer(a.id).mat().middleCols(start, width) +=
                        tp.grad_buffer(self).mat();
                  });
}

Var sum(Tape& t, Var a) {
  Tensor y = Tensor::scalar(t.value(a).mat().sum());
  return t.record(std::move(y), t.requires_grad(a), [a](Tape& tp, int self) {
    tp.grad_buffer(a.id).mat().array() += tp.grad_buffer(self)[0];
  });
}

Var mean(Tape& t, Var a) {
  const double n = static_cast<double>(t.value(a).size());
  if (n <= 0) fail("mean: empty tensor");
  Tensor y = Tensor::scalar(t.value(a).mat().sum() / n);
  return t.record(std::move(y), t.requires_grad(a), [a, n](Tape& tp, int self) {
    tp.grad_buffer(a.id).mat().array() += tp.grad_buffer(self)[0] / n;
  });
}

Var gather_cols(Tape& t, Var a, const std::vector<int>& index) {
  const Tensor& A = t.value(a);
  if (static_cast<int>(index.size()) != A.rows()) {
    fail("gather_cols: need one index per row");
  }
  Tensor y = Tensor::matrix(A.rows(), 1);
  for (int r = 0; r < A.rows(); ++r) {
    if (index[r] < 0 || index[r] >= A.cols()) fail("gather_cols: index out of range");
    y.at(r, 0) = A.at(r, index[r]);
  }
  return t.record(std::move(y), t.requires_grad(a), [a, index](Tape& tp, int self) {
    const Tensor& g = tp.grad_buffer(self);
    Tensor& ga = tp.grad_buffer(a.id);
    for (std::size_t r = 0; r < index.size(); ++r) {
      ga.at(static_cast<int>(r), index[r]) += g.at(static_cast<int>(r), 0);
    }
  });
}

Var log_softmax(Tape& t, Var a) {
  const Tensor& A = t.value(a);
  Tensor y = A;
  for (int r = 0; r < A.rows(); ++r) {
    auto row = y.mat().row(r);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    row.array() -= lse;
  }
  return t.record(std::move(y), t.requires_grad(a), [a](Tape& tp, int self) {
    const Tensor& g = tp.grad_buffer(self);
    const Tensor& y = tp.value_of(self);
    Tensor& ga = tp.grad_buffer(a.id);
    for (int r = 0; r < g.rows(); ++r) {
      const double gs = g.mat().row(r).sum();
      ga.mat().row(r).array() +=
          g.mat().row(r).array() - y.mat().row(r).array().exp() * gs;
    }
  });
}

Var clamp(Tape& t, Var a, double lo, double hi) {
  if (lo > hi) fail("clamp: lo > hi");
  return unary(t, a, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
               [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Var minimum(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  if (!A.same_shape(B)) fail("minimum: " + shapes(A, B));
  Tensor y = A;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::min(A[i], B[i]);
  return t.record(std::move(y), t.requires_grad(a) || t.requires_grad(b),
                  [a, b](Tape& tp, int self) {
                    const Tensor& g = tp.grad_buffer(self);
                    const Tensor& av = tp.value(a);
                    const Tensor& bv = tp.value(b);
                    for (std::size_t i = 0; i < g.size(); ++i) {
                      const bool take_a = av[i] <= bv[i];
                      if (take_a && tp.requires_grad(a)) tp.grad_buffer(a.id)[i] += g[i];
                      if (!take_a && tp.requires_grad(b)) tp.grad_buffer(b.id)[i] += g[i];
                    }
                  });
}

Var reshape(Tape& t, Var a, const std::vector<int>& shape) {
  const Tensor& A = t.value(a);
  Tensor y(shape, A.values());
  return t.record(std::move(y), t.requires_grad(a), [a](Tape& tp, int self) {
    const Tensor& g = tp.grad_buffer(self);
    Tensor& ga = tp.grad_buffer(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var block_left_multiply(Tape& t, const Tensor& op, Var x) {
  const Tensor& X = t.value(x);
  const int k = op.rows();
  if (op.cols() != k) fail("block_left_multiply: operator must be square");
  if (k <= 0 || X.rows() % k != 0) {
    fail("block_left_multiply: rows " + std::to_string(X.rows()) + " not a multiple of " +
         std::to_string(k));
  }
  const int blocks = X.rows() / k;
  Tensor y = Tensor::matrix(X.rows(), X.cols());
  for (int b = 0; b < blocks; ++b) {
    y.mat().middleRows(b * k, k).noalias() = op.mat() * X.mat().middleRows(b * k, k);
  }
  return t.record(std::move(y), t.requires_grad(x),
                  [x, op, k, blocks](Tape& tp, int self) {
                    const Tensor& g = tp.grad_buffer(self);
                    Tensor& gx = tp.grad_buffer(x.id);
                    for (int b = 0; b < blocks; ++b) {
                      gx.mat().middleRows(b * k, k).noalias() +=
                          op.mat().transpose() * g.mat().middleRows(b * k, k);
                    }
                  });
}

}  // namespace nanogrid::nn
