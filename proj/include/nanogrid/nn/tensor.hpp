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

#ifndef NANOGRID_NN_TENSOR_HPP_
#define NANOGRID_NN_TENSOR_HPP_

#include <array>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nanogrid::nn {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

// Dense row-major array of doubles, rank 0 to 3.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::initializer_list<int> shape, double fill = 0.0);
  explicit Tensor(const std::vector<int>& shape, double fill = 0.0);
  Tensor(const std::vector<int>& shape, std::vector<double> data);

  static Tensor matrix(int rows, int cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }
  static Tensor scalar(double v) { return Tensor(std::vector<int>{1, 1}, {v}); }
  static Tensor row(const std::vector<double>& values);

  int rank() const { return rank_; }
  int dim(int i) const { return dims_[i]; }
  std::vector<int> shape() const { return {dims_.begin(), dims_.begin() + rank_}; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Tensor& o) const;
  std::string shape_string() const;

  // Matrix view: rank 2 as is, rank 1 as a row, rank 3 as (d0*d1) x d2.
  int rows() const;
  int cols() const;
  MatrixMap mat() { return MatrixMap(data_.data(), rows(), cols()); }
  ConstMatrixMap mat() const { return ConstMatrixMap(data_.data(), rows(), cols()); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols() + c]; }
  double at(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols() + c];
  }

  void fill(double v);
  bool all_finite() const;

 private:
  void set_shape(const std::vector<int>& shape);

  int rank_ = 0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<double> data_;
};

}  // namespace nanogrid::nn

#endif  // NANOGRID_NN_TENSOR_HPP_
