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

#ifndef NANOGRID_NN_OPTIM_HPP_
#define NANOGRID_NN_OPTIM_HPP_

#include <functional>
#include <string>
#include <vector>

#include "nanogrid/nn/tape.hpp"

namespace nanogrid::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Rescale the joint gradient to this L2 norm when it is larger; 0 disables.
  double clip_norm = 0.0;
};

// One bias-corrected Adam update of `param` in place. t counts from 1.
void adam_step(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v, long t,
               const AdamConfig& cfg);

class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Parameter*> params, AdamConfig cfg);

  // Applies one update from the accumulated grads, then zeroes them.
  void step();
  void zero_grad();
  long steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> m_, v_;
  AdamConfig cfg_;
  long t_ = 0;
};

// Builds a scalar loss on the given tape.
using LossFn = std::function<Var(Tape&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // "name[index]" of the worst coordinate
};

// Compares the tape gradient of `loss` against central differences for every
// coordinate of every parameter. The relative error of a coordinate is
// |a - n| / max(|a|, |n|, floor); the floor keeps coordinates whose true
// gradient is zero from dividing rounding noise by itself.
GradCheckResult grad_check(const LossFn& loss, const std::vector<Parameter*>& params,
                           double step = 1e-5, double floor = 1e-6);

// Sum of squared gradient entries, for diagnostics and clipping.
double grad_norm(const std::vector<Parameter*>& params);

}  // namespace nanogrid::nn

#endif  // NANOGRID_NN_OPTIM_HPP_
