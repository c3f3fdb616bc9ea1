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

#include "lsp/metrics.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "lsp/error.h"
#include "lsp/random.h"
#include "metric_oracles.h"

namespace lsp {
namespace {

using testing::OracleAuc;
using testing::OracleAveragePrecision;
using testing::OracleF1;
using testing::OracleFairnessCounts;
using testing::OraclePsnr;
using testing::OracleSsim;

template <typename F>
ErrorKind KindOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an lsp::Error";
  return ErrorKind::kContract;
}

// Labels with both classes present and scores drawn from a small grid so
// that ties are common.
void RandomBinaryInstance(Rng& rng, std::vector<int>& y,
                          std::vector<double>& s) {
  const std::size_t n = 2 + rng() % 31;
  y.assign(n, 0);
  s.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(rng() % 2);
    s[i] = static_cast<double>(rng() % 7) / 6.0;
  }
  y[0] = 0;
  y[1] = 1;
}

TEST(PrivacyProtectionTest, FixedPoints) {
  EXPECT_DOUBLE_EQ(PrivacyProtection(0.9, 0.9, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(PrivacyProtection(0.9, 0.5, 0.5), 1.0);
  EXPECT_NEAR(PrivacyProtection(0.9, 0.7, 0.5), 0.5, 1e-12);
}

TEST(PrivacyProtectionTest, ClampsOutsideTheBaselineRange) {
  EXPECT_DOUBLE_EQ(PrivacyProtection(0.9, 0.95, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(PrivacyProtection(0.9, 0.3, 0.5), 1.0);
}

TEST(PrivacyProtectionTest, UndefinedBaselineIsNumericalError) {
  EXPECT_EQ(KindOf([] { PrivacyProtection(0.5, 0.5, 0.5); }),
            ErrorKind::kNumerical);
  EXPECT_EQ(KindOf([] { PrivacyProtection(0.4, 0.5, 0.5); }),
            ErrorKind::kNumerical);
}

TEST(PrivacyProtectionTest, MonotoneNonIncreasingInObfuscatedAccuracy) {
  double prev = 2.0;
  for (int i = 0; i <= 100; ++i) {
    const double obf = i / 100.0;
    const double p = PrivacyProtection(0.95, obf, 0.5);
    EXPECT_LE(p, prev);
    const double linear = (0.95 - obf) / (0.95 - 0.5);
    EXPECT_DOUBLE_EQ(p, std::clamp(linear, 0.0, 1.0));
    prev = p;
  }
}

TEST(AucRocTest, PerfectRankingIsOne) {
  const std::vector<int> y = {0, 0, 1, 1};
  const std::vector<double> s = {0.1, 0.2, 0.3, 0.4};
  EXPECT_DOUBLE_EQ(AucRoc(y, s), 1.0);
}

TEST(AucRocTest, HandExampleThreeWinsOneLoss) {
  // Pairs (pos, neg): (.9,.8) win, (.9,.2) win, (.4,.8) loss, (.4,.2) win.
  const std::vector<int> y = {1, 0, 1, 0};
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.2};
  EXPECT_DOUBLE_EQ(AucRoc(y, s), 0.75);
}

TEST(AucRocTest, HandExampleTwoWinsTwoLosses) {
  // Pairs: (.9,.95) loss, (.9,.2) win, (.4,.95) loss, (.4,.2) win.
  const std::vector<int> y = {1, 0, 1, 0};
  const std::vector<double> s = {0.9, 0.95, 0.4, 0.2};
  EXPECT_DOUBLE_EQ(AucRoc(y, s), 0.5);
}

TEST(AucRocTest, AllTiedScoresGiveOneHalf) {
  const std::vector<int> y = {1, 0, 1, 0, 0};
  const std::vector<double> s(5, 0.3);
  EXPECT_DOUBLE_EQ(AucRoc(y, s), 0.5);
}

TEST(AucRocTest, InvariantUnderStrictlyMonotoneTransform) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> y;
    std::vector<double> s;
    RandomBinaryInstance(rng, y, s);
    std::vector<double> t(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) t[i] = std::exp(3.0 * s[i]) - 7;
    EXPECT_DOUBLE_EQ(AucRoc(y, s), AucRoc(y, t));
  }
}

TEST(AucRocTest, MatchesPairCountingOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> y;
    std::vector<double> s;
    RandomBinaryInstance(rng, y, s);
    EXPECT_NEAR(AucRoc(y, s), OracleAuc(y, s), 1e-9);
  }
}

TEST(AveragePrecisionTest, PerfectRankingIsOne) {
  const std::vector<int> y = {1, 0, 1, 0};
  const std::vector<double> s = {0.9, 0.1, 0.8, 0.2};
  EXPECT_DOUBLE_EQ(AveragePrecision(y, s), 1.0);
}

TEST(AveragePrecisionTest, HandExample) {
  // Ranked: 1 (P=1, R=.5), 0, 1 (P=2/3, R=1).
  const std::vector<int> y = {1, 0, 1};
  const std::vector<double> s = {0.9, 0.5, 0.1};
  EXPECT_NEAR(AveragePrecision(y, s), 0.5 * 1.0 + 0.5 * (2.0 / 3.0), 1e-12);
}

TEST(AveragePrecisionTest, MatchesPerThresholdOracle) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> y;
    std::vector<double> s;
    RandomBinaryInstance(rng, y, s);
    EXPECT_NEAR(AveragePrecision(y, s), OracleAveragePrecision(y, s), 1e-9);
  }
}

TEST(F1ScoreTest, HandCounts) {
  // TP=2, FP=1, FN=1.
  const std::vector<int> y = {1, 1, 1, 0, 0};
  const std::vector<int> p = {1, 1, 0, 1, 0};
  EXPECT_NEAR(F1Score(y, p), 4.0 / 6.0, 1e-12);
}

TEST(F1ScoreTest, NoPositivesAnywhereIsZero) {
  const std::vector<int> y = {0, 0};
  const std::vector<int> p = {0, 0};
  EXPECT_DOUBLE_EQ(F1Score(y, p), 0.0);
}

TEST(F1ScoreTest, MatchesCountingOracle) {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 32;
    std::vector<int> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng() % 2);
      p[i] = static_cast<int>(rng() % 2);
    }
    EXPECT_NEAR(F1Score(y, p), OracleF1(y, p), 1e-9);
  }
}

TEST(ClassificationMetricsTest, ThresholdDrivesAccuracyAndF1) {
  const std::vector<int> y = {1, 0, 1, 0};
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.2};
  const ClassificationMetrics m = ComputeClassificationMetrics(y, s, 0.5);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
  EXPECT_NEAR(m.f1, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(m.auc_roc, 0.75);
  const ClassificationMetrics low = ComputeClassificationMetrics(y, s, 0.3);
  EXPECT_DOUBLE_EQ(low.accuracy, 0.75);
}

TEST(ClassificationMetricsTest, ErrorKinds) {
  const std::vector<int> empty;
  const std::vector<double> none;
  EXPECT_EQ(KindOf([&] { ComputeClassificationMetrics(empty, none); }),
            ErrorKind::kData);
  const std::vector<int> y = {1, 1};
  const std::vector<double> s = {0.2, 0.7};
  EXPECT_EQ(KindOf([&] { ComputeClassificationMetrics(y, s); }),
            ErrorKind::kNumerical);
  const std::vector<double> short_s = {0.2};
  const std::vector<int> y2 = {0, 1};
  EXPECT_EQ(KindOf([&] { ComputeClassificationMetrics(y2, short_s); }),
            ErrorKind::kData);
  const std::vector<double> nan_s = {0.2, NAN};
  EXPECT_EQ(KindOf([&] { ComputeClassificationMetrics(y2, nan_s); }),
            ErrorKind::kData);
  const std::vector<int> y3 = {0, 2};
  EXPECT_EQ(KindOf([&] { ComputeClassificationMetrics(y3, s); }),
            ErrorKind::kData);
}

TEST(PsnrTest, IdenticalImagesGiveSentinel) {
  const Tensor x = Tensor::FromRows({{0.1, 0.2}, {0.3, 0.4}});
  EXPECT_EQ(Psnr(x, x, 1.0), kPsnrInfinite);
}

TEST(PsnrTest, MseOfOneHundredthIsTwentyDecibels) {
  const Tensor x = Tensor::FromRows({{0.5, 0.5}, {0.5, 0.5}});
  const Tensor y = Tensor::FromRows({{0.6, 0.4}, {0.6, 0.4}});
  EXPECT_NEAR(Psnr(x, y, 1.0), 20.0, 1e-9);
}

TEST(PsnrTest, MseEqualToPeakSquaredIsZero) {
  const Tensor x = Tensor::FromRows({{0.0, 0.0}});
  const Tensor y = Tensor::FromRows({{2.0, 2.0}});
  EXPECT_NEAR(Psnr(x, y, 2.0), 0.0, 1e-12);
}

TEST(PsnrTest, StrictlyDecreasingInMse) {
  const Tensor x({4, 4}, 0.5);
  double prev = kPsnrInfinite;
  for (int k = 1; k <= 20; ++k) {
    const Tensor y({4, 4}, 0.5 + 0.01 * k);
    const double p = Psnr(x, y, 1.0);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(PsnrTest, ShapeMismatchIsShapeError) {
  EXPECT_EQ(KindOf([] { Psnr(Tensor({2, 2}), Tensor({2, 3}), 1.0); }),
            ErrorKind::kShape);
}

TEST(PsnrTest, MatchesDirectOracle) {
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + rng() % 4, w = 1 + rng() % 8;
    Tensor x({h, w}), y({h, w});
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = UniformUnit(rng);
      y[i] = UniformUnit(rng);
    }
    EXPECT_NEAR(Psnr(x, y, 1.0), OraclePsnr(x, y, 1.0), 1e-9);
  }
}

TEST(SsimTest, IdenticalImagesGiveExactlyOne) {
  Rng rng(16);
  Tensor x({10, 12});
  for (double& v : x.mutable_values()) v = UniformUnit(rng);
  EXPECT_EQ(Ssim(x, x), 1.0);
}

TEST(SsimTest, ConstantImagesMatchClosedForm) {
  const double a = 0.3, b = 0.7;
  const Tensor x({8, 8}, a), y({8, 8}, b);
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  const double expected = ((2 * a * b + c1) * c2) / ((a * a + b * b + c1) * c2);
  EXPECT_NEAR(Ssim(x, y), expected, 1e-12);
}

TEST(SsimTest, WindowLargerThanImageIsShapeError) {
  EXPECT_EQ(KindOf([] { Ssim(Tensor({4, 4}), Tensor({4, 4})); }),
            ErrorKind::kShape);
}

TEST(SsimTest, Random16x16MatchesPerWindowOracle) {
  Rng rng(17);
  Tensor x({16, 16}), y({16, 16});
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = UniformUnit(rng);
    y[i] = 0.5 * x[i] + 0.5 * UniformUnit(rng);
  }
  EXPECT_NEAR(Ssim(x, y), OracleSsim(x, y, 8, 0.01, 0.03, 1.0), 1e-9);
}

TEST(SsimTest, SmallWindowsMatchOracle) {
  Rng rng(18);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 2 + rng() % 4, w = 2 + rng() % 6;
    SsimParams p;
    p.window = 1 + rng() % std::min(h, w);
    Tensor x({h, w}), y({h, w});
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = UniformUnit(rng);
      y[i] = UniformUnit(rng);
    }
    const double got = Ssim(x, y, p);
    EXPECT_NEAR(got, OracleSsim(x, y, p.window, p.k1, p.k2, 1.0), 1e-9);
    EXPECT_GE(got, -1.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(FairnessTest, GroupIndependentPredictionsGiveZero) {
  const std::vector<int> y_hat = {1, 0, 1, 0};
  const std::vector<int> y_true = {1, 0, 1, 0};
  const std::vector<int> group = {0, 0, 1, 1};
  const FairnessMetrics f = ComputeFairness(y_hat, y_true, group);
  EXPECT_EQ(f.demographic_parity_diff, 0.0);
  ASSERT_TRUE(f.equal_opportunity_diff.has_value());
  EXPECT_EQ(*f.equal_opportunity_diff, 0.0);
}

TEST(FairnessTest, OppositeGroupPredictionsGiveOne) {
  const std::vector<int> y_hat = {1, 1, 0, 0};
  const std::vector<int> y_true = {1, 0, 1, 0};
  const std::vector<int> group = {0, 0, 1, 1};
  const FairnessMetrics f = ComputeFairness(y_hat, y_true, group);
  EXPECT_EQ(f.demographic_parity_diff, 1.0);
  EXPECT_EQ(*f.equal_opportunity_diff, 1.0);
}

TEST(FairnessTest, HandCountedEightRows) {
  // Group 0: y_hat 1,1,0,0 (rate 1/2); positives rows 0,2 -> tpr 1/2.
  // Group 1: y_hat 1,0,0,0 (rate 1/4); positives rows 4,5,6 -> tpr 1/3.
  const std::vector<int> y_hat = {1, 1, 0, 0, 1, 0, 0, 0};
  const std::vector<int> y_true = {1, 0, 1, 0, 1, 1, 1, 0};
  const std::vector<int> group = {0, 0, 0, 0, 1, 1, 1, 1};
  const FairnessMetrics f = ComputeFairness(y_hat, y_true, group);
  EXPECT_NEAR(f.demographic_parity_diff, 0.25, 1e-15);
  EXPECT_NEAR(*f.equal_opportunity_diff, 0.5 - 1.0 / 3.0, 1e-15);
}

TEST(FairnessTest, NoPositivesInAGroupLeavesEqualOpportunityAbsent) {
  const std::vector<int> y_hat = {1, 0, 1, 0};
  const std::vector<int> y_true = {1, 0, 0, 0};
  const std::vector<int> group = {0, 0, 1, 1};
  EXPECT_FALSE(ComputeFairness(y_hat, y_true, group)
                   .equal_opportunity_diff.has_value());
}

TEST(FairnessTest, EmptyGroupIsDataError) {
  const std::vector<int> v = {1, 0};
  const std::vector<int> group = {0, 0};
  EXPECT_EQ(KindOf([&] { ComputeFairness(v, v, group); }), ErrorKind::kData);
}

TEST(FairnessTest, MatchesCountingOracle) {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 31;
    std::vector<int> y_hat(n), y_true(n), group(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_hat[i] = static_cast<int>(rng() % 2);
      y_true[i] = static_cast<int>(rng() % 2);
      group[i] = static_cast<int>(rng() % 2);
    }
    group[0] = 0;
    group[1] = 1;
    const FairnessMetrics got = ComputeFairness(y_hat, y_true, group);
    const auto want = OracleFairnessCounts(y_hat, y_true, group);
    EXPECT_NEAR(got.demographic_parity_diff, want.dp, 1e-9);
    ASSERT_EQ(got.equal_opportunity_diff.has_value(), want.eo.has_value());
    if (want.eo) EXPECT_NEAR(*got.equal_opportunity_diff, *want.eo, 1e-9);
  }
}

}  // namespace
}  // namespace lsp
