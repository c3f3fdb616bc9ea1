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

#include "lsp/dp_noise.h"

#include <algorithm>
#include <cmath>

#include "lsp/error.h"
#include "lsp/random.h"

namespace lsp {

void DpParams::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("dp: epsilon must be a finite value > 0");
  }
  if (!(clip_bound > 0.0) || !std::isfinite(clip_bound)) {
    throw ConfigError("dp: clip_bound must be a finite value > 0");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ConfigError("dp: delta must lie in [0, 1)");
  }
  if (mechanism == DpMechanism::kGaussian && delta == 0.0) {
    throw ConfigError("dp: the gaussian mechanism requires delta > 0");
  }
}

const char* DpMechanismName(DpMechanism m) {
  return m == DpMechanism::kLaplace ? "laplace" : "gaussian";
}

DpMechanism ParseDpMechanism(const std::string& name) {
  if (name == "laplace") return DpMechanism::kLaplace;
  if (name == "gaussian") return DpMechanism::kGaussian;
  throw ConfigError("dp: unknown mechanism '" + name +
                    "' (expected laplace or gaussian)");
}

double DpNoiseScale(const DpParams& params) {
  params.Validate();
  if (params.mechanism == DpMechanism::kLaplace) {
    return params.clip_bound / params.epsilon;
  }
  return params.clip_bound * std::sqrt(2.0 * std::log(1.25 / params.delta)) /
         params.epsilon;
}

Tensor DpPerturb(const Tensor& x, const DpParams& params, std::uint64_t seed) {
  const double scale = DpNoiseScale(params);
  Rng rng = MakeRng(seed, SeedComponent::kDpNoise);
  Tensor out = x;
  for (double& v : out.mutable_values()) {
    const double noise = params.mechanism == DpMechanism::kLaplace
                             ? StandardLaplace(rng)
                             : StandardNormal(rng);
    v = std::clamp(v, -params.clip_bound, params.clip_bound) + scale * noise;
  }
  return out;
}

}  // namespace lsp
