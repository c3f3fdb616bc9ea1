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
#include <numeric>
#include <string>
#include <vector>

#include "lsp/error.h"

namespace lsp {

double PrivacyProtection(double acc_raw, double acc_obf, double chance) {
  if (!(acc_raw > chance)) {
    throw NumericalError(
        "privacy_protection: raw attacker accuracy " + std::to_string(acc_raw) +
        " does not exceed chance " + std::to_string(chance) +
        "; the score is undefined");
  }
  return std::clamp((acc_raw - acc_obf) / (acc_raw - chance), 0.0, 1.0);
}

namespace {

void CheckBinaryInput(std::span<const int> y_true,
                      std::span<const double> scores) {
  if (y_true.empty()) throw DataError("classification metrics: empty input");
  if (y_true.size() != scores.size()) {
    throw DataError("classification metrics: " +
                    std::to_string(y_true.size()) + " labels vs " +
                    std::to_string(scores.size()) + " scores");
  }
  std::size_t positives = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] != 0 && y_true[i] != 1) {
      throw DataError("classification metrics: label " +
                      std::to_string(y_true[i]) + " at row " +
                      std::to_string(i) + " is not binary");
    }
    if (!std::isfinite(scores[i])) {
      throw DataError("classification metrics: non-finite score at row " +
                      std::to_string(i));
    }
    positives += static_cast<std::size_t>(y_true[i]);
  }
  if (positives == 0 || positives == y_true.size()) {
    throw NumericalError(
        "classification metrics: y_true holds a single class; AUC-ROC and "
        "average precision are undefined");
  }
}

// Row order by descending score.
std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

}  // namespace

double AucRoc(std::span<const int> y_true, std::span<const double> scores) {
  CheckBinaryInput(y_true, scores);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of midranks of the positives.
  double rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (y_true[order[k]] == 1) {
        rank_sum += midrank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double AveragePrecision(std::span<const int> y_true,
                        std::span<const double> scores) {
  CheckBinaryInput(y_true, scores);
  const std::vector<std::size_t> order = DescendingOrder(scores);
  const double total_pos =
      static_cast<double>(std::count(y_true.begin(), y_true.end(), 1));
  double tp = 0.0, fp = 0.0, prev_recall = 0.0, ap = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (y_true[order[j]] == 1) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
      ++j;
    }
    const double recall = tp / total_pos;
    const double precision = tp / (tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double F1Score(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("f1: label and prediction counts differ");
  }
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_pred[i] == 1 && y_true[i] == 1) tp += 1;
    if (y_pred[i] == 1 && y_true[i] == 0) fp += 1;
    if (y_pred[i] == 0 && y_true[i] == 1) fn += 1;
  }
  const double denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2 * tp / denom;
}

ClassificationMetrics ComputeClassificationMetrics(
    std::span<const int> y_true, std::span<const double> scores,
    double threshold) {
  CheckBinaryInput(y_true, scores);
  std::vector<int> pred(scores.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    pred[i] = scores[i] >= threshold ? 1 : 0;
    if (pred[i] == y_true[i]) ++correct;
  }
  ClassificationMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  m.f1 = F1Score(y_true, pred);
  m.auc_roc = AucRoc(y_true, scores);
  m.avg_precision = AveragePrecision(y_true, scores);
  return m;
}

double Psnr(const Tensor& x, const Tensor& y, double max_val) {
  if (!(max_val > 0.0)) throw ConfigError("psnr: max_val must be > 0");
  const double mse = MeanSquaredError(x, y);
  if (mse == 0.0) return kPsnrInfinite;
  return 10.0 * std::log10(max_val * max_val / mse);
}

namespace {

// (h+1) x (w+1) summed-area table of f(a, b) elementwise.
template <typename F>
std::vector<double> SummedArea(const Tensor& a, const Tensor& b, F f) {
  const std::size_t h = a.rows(), w = a.cols();
  std::vector<double> sat((h + 1) * (w + 1), 0.0);
  for (std::size_t i = 0; i < h; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      row += f(a(i, j), b(i, j));
      sat[(i + 1) * (w + 1) + j + 1] = sat[i * (w + 1) + j + 1] + row;
    }
  }
  return sat;
}

}  // namespace

double Ssim(const Tensor& x, const Tensor& y, const SsimParams& p) {
  if (x.rank() != 2 || !x.SameShape(y)) {
    throw ShapeError("ssim: images must be matrices of equal shape, got " +
                     ShapeToString(x.shape()) + " and " +
                     ShapeToString(y.shape()));
  }
  if (p.window == 0 || p.window > x.rows() || p.window > x.cols()) {
    throw ShapeError("ssim: window " + std::to_string(p.window) +
                     " does not fit image " + ShapeToString(x.shape()));
  }
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  const auto sx = SummedArea(x, y, [](double a, double) { return a; });
  const auto sy = SummedArea(x, y, [](double, double b) { return b; });
  const auto sxx = SummedArea(x, y, [](double a, double) { return a * a; });
  const auto syy = SummedArea(x, y, [](double, double b) { return b * b; });
  const auto sxy = SummedArea(x, y, [](double a, double b) { return a * b; });
  const std::size_t w = x.cols(), k = p.window;
  const double n = static_cast<double>(k * k);
  auto box = [&](const std::vector<double>& s, std::size_t i, std::size_t j) {
    return s[(i + k) * (w + 1) + j + k] - s[i * (w + 1) + j + k] -
           s[(i + k) * (w + 1) + j] + s[i * (w + 1) + j];
  };
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + k <= x.rows(); ++i) {
    for (std::size_t j = 0; j + k <= x.cols(); ++j) {
      const double mx = box(sx, i, j) / n;
      const double my = box(sy, i, j) / n;
      const double vx = box(sxx, i, j) / n - mx * mx;
      const double vy = box(syy, i, j) / n - my * my;
      const double cov = box(sxy, i, j) / n - mx * my;
      total += ((2 * mx * my + c1) * (2 * cov + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

FairnessMetrics ComputeFairness(std::span<const int> y_hat,
                                std::span<const int> y_true,
                                std::span<const int> group) {
  if (y_hat.size() != y_true.size() || y_hat.size() != group.size()) {
    throw DataError("fairness: input lengths differ");
  }
  double n[2] = {0, 0}, pos_pred[2] = {0, 0};
  double n_pos[2] = {0, 0}, tp[2] = {0, 0};
  for (std::size_t i = 0; i < y_hat.size(); ++i) {
    const int g = group[i];
    if (g != 0 && g != 1) {
      throw DataError("fairness: group value at row " + std::to_string(i) +
                      " is not binary");
    }
    n[g] += 1;
    pos_pred[g] += y_hat[i] == 1;
    if (y_true[i] == 1) {
      n_pos[g] += 1;
      tp[g] += y_hat[i] == 1;
    }
  }
  if (n[0] == 0 || n[1] == 0) {
    throw DataError("fairness: group " + std::string(n[0] == 0 ? "0" : "1") +
                    " is empty");
  }
  FairnessMetrics f;
  f.demographic_parity_diff = std::abs(pos_pred[0] / n[0] - pos_pred[1] / n[1]);
  if (n_pos[0] > 0 && n_pos[1] > 0) {
    f.equal_opportunity_diff = std::abs(tp[0] / n_pos[0] - tp[1] / n_pos[1]);
  }
  return f;
}

}  // namespace lsp
