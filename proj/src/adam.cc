//
// Copyright 2026 The LSP Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "lsp/adam.h"

#include <cmath>

#include "lsp/error.h"

namespace lsp {

Adam::Adam(std::vector<Parameter*> params, AdamOptions options,
           std::vector<double> lr_scales)
    : params_(std::move(params)),
      options_(options),
      lr_scales_(std::move(lr_scales)) {
  if (lr_scales_.empty()) lr_scales_.assign(params_.size(), 1.0);
  if (lr_scales_.size() != params_.size()) {
    throw ConfigError("adam: " + std::to_string(lr_scales_.size()) +
                      " learning-rate scales for " +
                      std::to_string(params_.size()) + " parameters");
  }
  for (double s : lr_scales_) {
    if (!(s > 0.0)) throw ConfigError("adam: learning-rate scales must be > 0");
  }
  if (!(options_.learning_rate > 0.0)) {
    throw ConfigError("adam: learning rate must be > 0");
  }
  if (!(options_.beta1 >= 0.0 && options_.beta1 < 1.0) ||
      !(options_.beta2 >= 0.0 && options_.beta2 < 1.0)) {
    throw ConfigError("adam: betas must lie in [0, 1)");
  }
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter* p : params_) {
    m_.emplace_back(p->value.shape(), 0.0);
    v_.emplace_back(p->value.shape(), 0.0);
  }
}

void Adam::Step() {
  for (const Parameter* p : params_) {
    if (!p->has_grad()) {
      throw ContractError("adam: parameter '" + p->name + "' has no grad");
    }
    if (!p->grad.SameShape(p->value)) {
      throw ShapeError("adam: grad shape of '" + p->name + "' is " +
                       ShapeToString(p->grad.shape()));
    }
  }
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    auto w = p.value.mutable_values();
    auto g = p.grad.mutable_values();
    auto m = m_[k].mutable_values();
    auto v = v_[k].mutable_values();
    const double lr = lr_scales_[k] * options_.learning_rate;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + options_.epsilon);
      if (options_.float32_storage) {
        w[i] = static_cast<double>(static_cast<float>(w[i]));
      }
      g[i] = 0.0;
    }
  }
}

}  // namespace lsp
