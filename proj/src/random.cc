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

#include "lsp/random.h"

#include <cmath>
#include <numbers>

namespace lsp {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t master, SeedComponent component,
                         std::uint64_t counter) {
  return SplitMix64(master +
                    static_cast<std::uint64_t>(component) *
                        0x9E3779B97F4A7C15ULL +
                    counter * 0xD1B54A32D192ED03ULL);
}

double StandardNormal(Rng& rng) {
  const double u1 = UniformOpenUnit(rng);
  const double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double StandardLaplace(Rng& rng) {
  const double e1 = -std::log(UniformOpenUnit(rng));
  const double e2 = -std::log(UniformOpenUnit(rng));
  return e1 - e2;
}

}  // namespace lsp
