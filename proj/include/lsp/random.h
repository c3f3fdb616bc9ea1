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

#ifndef LSP_RANDOM_H_
#define LSP_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>

namespace lsp {

using Rng = std::mt19937_64;

// Component identifiers for seed derivation. Every random stream in a run is
// derived from the single master seed, so any component can be re-run alone.
enum class SeedComponent : std::uint64_t {
  kModelInit = 1,
  kTrainShuffle = 2,
  kDropout = 3,
  kSplit = 4,
  kAttacker = 5,
  kDownstream = 6,
  kDpNoise = 7,
  kSynthetic = 8,
  kBench = 9,
};

std::uint64_t SplitMix64(std::uint64_t x);

// seed' = splitmix64(master + component * golden + counter * c2)
std::uint64_t DeriveSeed(std::uint64_t master, SeedComponent component,
                         std::uint64_t counter = 0);

inline Rng MakeRng(std::uint64_t master, SeedComponent component,
                   std::uint64_t counter = 0) {
  return Rng(DeriveSeed(master, component, counter));
}

// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in the open interval (0, 1).
inline double UniformOpenUnit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller on raw engine draws, so samples are identical across standard
// library implementations.
double StandardNormal(Rng& rng);

// Laplace(0, 1) as the difference of two unit exponentials.
double StandardLaplace(Rng& rng);

// Fisher-Yates shuffle driven by `rng`. Uses only raw engine draws so the
// permutation does not depend on the standard library's distribution code.
template <typename T>
void FisherYatesShuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace lsp

#endif  // LSP_RANDOM_H_
