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

#include "nanogrid/nn/optim.hpp"

#include <algorithm>
#include <cmath>

#include "nanogrid/errors.hpp"

namespace nanogrid::nn {

void adam_step(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v, long t,
               const AdamConfig& cfg) {
  if (!param.same_shape(grad) || !param.same_shape(m) || !param.same_shape(v)) {
    throw ContractError("adam_step: shapes " + param.shape_string() + ", " +
                        grad.shape_string() + ", " + m.shape_string() + ", " +
                        v.shape_string());
  }
  if (t < 1) throw ContractError("adam_step: t must be >= 1");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    param[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

Adam::Adam(std::vector<Parameter*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  for (const Parameter* p : params_) {
    m_.emplace_back(p->value.shape(), 0.0);
    v_.emplace_back(p->value.shape(), 0.0);
  }
}

double grad_norm(const std::vector<Parameter*>& params) {
  double s = 0.0;
  for (const Parameter* p : params) s += p->grad.mat().squaredNorm();
  return std::sqrt(s);
}

void Adam::step() {
  ++t_;
  if (cfg_.clip_norm > 0.0) {
    const double norm = grad_norm(params_);
    if (norm > cfg_.clip_norm) {
      const double k = cfg_.clip_norm / norm;
      for (Parameter* p : params_) p->grad.mat() *= k;
    }
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    adam_step(params_[i]->value, params_[i]->grad, m_[i], v_[i], t_, cfg_);
  }
  zero_grad();
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

GradCheckResult grad_check(const LossFn& loss, const std::vector<Parameter*>& params,
                           double step, double floor) {
  std::vector<Tensor> saved;
  for (Parameter* p : params) {
    saved.push_back(p->grad);
    p->zero_grad();
  }
  {
    Tape t;
    t.backward(loss(t));
  }
  std::vector<Tensor> analytic;
  for (std::size_t i = 0; i < params.size(); ++i) {
    analytic.push_back(params[i]->grad);
    params[i]->grad = saved[i];
  }

  auto eval = [&loss]() {
    Tape t(false);
    return t.value(loss(t))[0];
  };

  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& value = params[k]->value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double x0 = value[i];
      value[i] = x0 + step;
      const double up = eval();
      value[i] = x0 - step;
      const double down = eval();
      value[i] = x0;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_rel_error || result.worst.empty()) {
        result.max_rel_error = std::max(result.max_rel_error, rel);
        if (rel >= result.max_rel_error) {
          result.worst = params[k]->name + "[" + std::to_string(i) + "]";
        }
      }
    }
  }
  return result;
}

}  // namespace nanogrid::nn
