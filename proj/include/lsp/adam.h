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

#ifndef LSP_ADAM_H_
#define LSP_ADAM_H_

#include <cstdint>
#include <vector>

#include "lsp/autodiff.h"

namespace lsp {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Round every updated parameter to the nearest float32. Keeps in-memory
  // weights exactly representable in the on-disk model format.
  bool float32_storage = false;
};

// Adam with bias correction. Moment buffers are allocated lazily per
// parameter on the first step.
class Adam {
 public:
  // `lr_scales` multiplies the learning rate per parameter; empty means 1
  // for every parameter.
  Adam(std::vector<Parameter*> params, AdamOptions options = {},
       std::vector<double> lr_scales = {});

  // Applies one update from the current grads, then zeroes every grad.
  // Throws a contract error naming any parameter without a grad.
  void Step();

  std::int64_t step_count() const { return t_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<double>& lr_scales() const { return lr_scales_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }

 private:
  std::vector<Parameter*> params_;
  AdamOptions options_;
  std::vector<double> lr_scales_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t t_ = 0;
};

}  // namespace lsp

#endif  // LSP_ADAM_H_
