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

#include "nanogrid/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "nanogrid/errors.hpp"

namespace nanogrid::nn {

Tensor::Tensor(std::initializer_list<int> shape, double fill)
    : Tensor(std::vector<int>(shape), fill) {}

Tensor::Tensor(const std::vector<int>& shape, double fill) {
  set_shape(shape);
  std::size_t n = 1;
  for (int i = 0; i < rank_; ++i) n *= static_cast<std::size_t>(dims_[i]);
  data_.assign(n, fill);
}

Tensor::Tensor(const std::vector<int>& shape, std::vector<double> data) {
  set_shape(shape);
  std::size_t n = 1;
  for (int i = 0; i < rank_; ++i) n *= static_cast<std::size_t>(dims_[i]);
  if (data.size() != n) {
    throw ContractError("tensor data has " + std::to_string(data.size()) +
                        " elements, shape " + shape_string() + " needs " +
                        std::to_string(n));
  }
  data_ = std::move(data);
}

Tensor Tensor::row(const std::vector<double>& values) {
  return Tensor({1, static_cast<int>(values.size())}, values);
}

void Tensor::set_shape(const std::vector<int>& shape) {
  if (shape.size() > 3) throw ContractError("tensor rank must be <= 3");
  for (int d : shape) {
    if (d < 0) throw ContractError("tensor dimensions must be >= 0");
  }
  rank_ = static_cast<int>(shape.size());
  dims_ = {1, 1, 1};
  std::copy(shape.begin(), shape.end(), dims_.begin());
}

bool Tensor::same_shape(const Tensor& o) const {
  return rows() == o.rows() && cols() == o.cols() && size() == o.size();
}

std::string Tensor::shape_string() const {
  std::string s = "(";
  for (int i = 0; i < rank_; ++i) {
    if (i) s += "x";
    s += std::to_string(dims_[i]);
  }
  return s + ")";
}

int Tensor::rows() const {
  switch (rank_) {
    case 0:
    case 1: return 1;
    case 2: return dims_[0];
    default: return dims_[0] * dims_[1];
  }
}

int Tensor::cols() const {
  switch (rank_) {
    case 0: return 1;
    case 1: return dims_[0];
    case 2: return dims_[1];
    default: return dims_[2];
  }
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace nanogrid::nn
