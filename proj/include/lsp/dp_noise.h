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

#ifndef LSP_DP_NOISE_H_
#define LSP_DP_NOISE_H_

#include <cstdint>
#include <string>

#include "lsp/tensor.h"

namespace lsp {

enum class DpMechanism { kLaplace, kGaussian };

struct DpParams {
  double epsilon = 1.0;
  double delta = 0.0;
  double clip_bound = 1.0;
  DpMechanism mechanism = DpMechanism::kLaplace;

  // Throws a config error for epsilon <= 0, clip_bound <= 0, delta outside
  // [0, 1), or the Gaussian mechanism with delta == 0.
  void Validate() const;
};

const char* DpMechanismName(DpMechanism m);
// Accepts "laplace" or "gaussian"; anything else is a config error.
DpMechanism ParseDpMechanism(const std::string& name);

// Laplace: b = clip / epsilon. Gaussian: sigma = clip sqrt(2 ln(1.25/delta))
// / epsilon.
double DpNoiseScale(const DpParams& params);

// Clips every cell to [-clip_bound, clip_bound], then adds independent
// noise of the configured mechanism. Deterministic given `seed`.
Tensor DpPerturb(const Tensor& x, const DpParams& params, std::uint64_t seed);

}  // namespace lsp

#endif  // LSP_DP_NOISE_H_
