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

#ifndef LSP_METRICS_H_
#define LSP_METRICS_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>

#include "lsp/tensor.h"

namespace lsp {

// Normalized reduction in attacker advantage:
//   clamp((acc_raw - acc_obf) / (acc_raw - chance), 0, 1).
// 0 means the release leaks as much as the raw data, 1 means the attacker
// is at chance. Throws a numerical error when acc_raw <= chance.
double PrivacyProtection(double acc_raw, double acc_obf, double chance);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;
  double auc_roc = 0.0;
  double avg_precision = 0.0;
};

// Binary labels (0/1) and one finite score per row. Accuracy and F1 use
// score >= threshold as the positive prediction. Throws a data error on
// empty or mismatched input and a numerical error when y_true holds a single
// class (AUC and AP are undefined).
ClassificationMetrics ComputeClassificationMetrics(
    std::span<const int> y_true, std::span<const double> scores,
    double threshold = 0.5);

// Mann-Whitney statistic with midranks; tied scores count 1/2.
double AucRoc(std::span<const int> y_true, std::span<const double> scores);
// sum_k (R_k - R_{k-1}) * P_k over distinct score thresholds, descending.
double AveragePrecision(std::span<const int> y_true,
                        std::span<const double> scores);
// 2TP / (2TP + FP + FN); 0 when the denominator is 0.
double F1Score(std::span<const int> y_true, std::span<const int> y_pred);

inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

// 10 log10(max_val^2 / MSE); kPsnrInfinite when the images are identical.
double Psnr(const Tensor& x, const Tensor& y, double max_val);

struct SsimParams {
  std::size_t window = 8;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Mean SSIM over every window x window patch (stride 1, uniform weights,
// population moments) of two h x w images.
double Ssim(const Tensor& x, const Tensor& y, const SsimParams& params = {});

struct FairnessMetrics {
  double demographic_parity_diff = 0.0;
  // Absent when either group has no positive true labels.
  std::optional<double> equal_opportunity_diff;
};

// dp = |P(yhat=1|g=0) - P(yhat=1|g=1)|,
// eo = |P(yhat=1|y=1,g=0) - P(yhat=1|y=1,g=1)|. All inputs binary; both
// groups must be non-empty.
FairnessMetrics ComputeFairness(std::span<const int> y_hat,
                                std::span<const int> y_true,
                                std::span<const int> group);

}  // namespace lsp

#endif  // LSP_METRICS_H_
