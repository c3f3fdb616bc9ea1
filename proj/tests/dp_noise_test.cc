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

#include <cmath>
#include <optional>

#include "gtest/gtest.h"
#include "lsp/error.h"

namespace lsp {
namespace {

std::optional<ErrorKind> ValidateKind(const DpParams& p) {
  try {
    p.Validate();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Noise added to a zero matrix, so every cell is a pure noise draw.
Moments NoiseMoments(const DpParams& p, std::size_t n, std::uint64_t seed) {
  const Tensor noisy = DpPerturb(Tensor({n, 1}, 0.0), p, seed);
  double sum = 0.0;
  for (double v : noisy.values()) sum += v;
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double v : noisy.values()) sq += (v - mean) * (v - mean);
  return {mean, sq / static_cast<double>(n - 1)};
}

TEST(DpParamsTest, RejectsInvalidSettings) {
  EXPECT_EQ(ValidateKind({.epsilon = 0.0}), ErrorKind::kConfig);
  EXPECT_EQ(ValidateKind({.epsilon = -1.0}), ErrorKind::kConfig);
  EXPECT_EQ(ValidateKind({.clip_bound = 0.0}), ErrorKind::kConfig);
  EXPECT_EQ(ValidateKind({.delta = 1.0}), ErrorKind::kConfig);
  EXPECT_EQ(ValidateKind({.delta = 0.0, .mechanism = DpMechanism::kGaussian}),
            ErrorKind::kConfig);
  EXPECT_EQ(ValidateKind({.delta = 1e-5, .mechanism = DpMechanism::kGaussian}),
            std::nullopt);
}

TEST(DpParamsTest, MechanismNamesRoundTrip) {
  for (DpMechanism m : {DpMechanism::kLaplace, DpMechanism::kGaussian}) {
    EXPECT_EQ(ParseDpMechanism(DpMechanismName(m)), m);
  }
  try {
    ParseDpMechanism("exponential");
    FAIL() << "expected a config error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(DpNoiseScaleTest, LaplaceScaleIsClipOverEpsilon) {
  EXPECT_DOUBLE_EQ(DpNoiseScale({.epsilon = 4.0, .clip_bound = 2.0}), 0.5);
}

TEST(DpNoiseScaleTest, GaussianSigmaMatchesClosedForm) {
  const DpParams p{.epsilon = 1.0,
                   .delta = 1e-5,
                   .clip_bound = 1.0,
                   .mechanism = DpMechanism::kGaussian};
  EXPECT_NEAR(DpNoiseScale(p), std::sqrt(2.0 * std::log(125000.0)), 1e-12);
  EXPECT_NEAR(DpNoiseScale(p), 4.84481, 1e-5);
}

TEST(DpPerturbTest, ClipsBeforeAddingNoise) {
  const DpParams p{.epsilon = 1e12, .clip_bound = 0.5};
  const Tensor x = Tensor::FromRows({{-3.0, 0.2, 9.0}});
  const Tensor y = DpPerturb(x, p, 1);
  EXPECT_NEAR(y(0, 0), -0.5, 1e-9);
  EXPECT_NEAR(y(0, 1), 0.2, 1e-9);
  EXPECT_NEAR(y(0, 2), 0.5, 1e-9);
}

TEST(DpPerturbTest, HugeEpsilonLeavesDataNearlyUnchanged) {
  const DpParams p{.epsilon = 1e9};
  Tensor x({20, 10});
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(i % 11) / 10.0;
  }
  const Tensor y = DpPerturb(x, p, 7);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT(std::abs(y[i] - x[i]), 1e-3);
}

TEST(DpPerturbTest, SameSeedSameOutputDifferentSeedDifferentOutput) {
  const DpParams p{.epsilon = 1.0};
  const Tensor x({5, 4}, 0.3);
  EXPECT_EQ(DpPerturb(x, p, 9), DpPerturb(x, p, 9));
  EXPECT_NE(DpPerturb(x, p, 9), DpPerturb(x, p, 10));
}

TEST(DpPerturbTest, LaplaceVarianceMatchesTwoBSquared) {
  const DpParams p{.epsilon = 1.0, .clip_bound = 1.0};
  const Moments m = NoiseMoments(p, 1000000, 21);
  EXPECT_NEAR(m.variance, 2.0, 0.05 * 2.0);
  EXPECT_LT(std::abs(m.mean), 3.0 * std::sqrt(2.0 / 1e6));
}

TEST(DpPerturbTest, GaussianVarianceMatchesSigmaSquared) {
  const DpParams p{.epsilon = 2.0,
                   .delta = 1e-5,
                   .clip_bound = 1.0,
                   .mechanism = DpMechanism::kGaussian};
  const double sigma = DpNoiseScale(p);
  const Moments m = NoiseMoments(p, 1000000, 22);
  EXPECT_NEAR(m.variance, sigma * sigma, 0.05 * sigma * sigma);
  EXPECT_LT(std::abs(m.mean), 3.0 * sigma / std::sqrt(1e6));
}

}  // namespace
}  // namespace lsp
