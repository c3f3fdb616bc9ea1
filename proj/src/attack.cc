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

#include "lsp/attack.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "lsp/adam.h"
#include "lsp/autodiff.h"
#include "lsp/error.h"
#include "lsp/random.h"

namespace lsp {

void ClassifierConfig::Validate() const {
  if (epochs < 1) throw ConfigError("classifier: epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("classifier: batch_size must be > 0");
  if (!(learning_rate > 0.0)) {
    throw ConfigError("classifier: learning_rate must be > 0");
  }
  for (std::size_t w : hidden) {
    if (w == 0) throw ConfigError("classifier: hidden widths must be > 0");
  }
}

Standardizer Standardizer::Fit(const Tensor& x) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0) throw DataError("standardizer: empty input");
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += x(i, j);
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x(i, j) - s.mean[j];
      s.scale[j] += c * c;
    }
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

Tensor Standardizer::Apply(const Tensor& x) const {
  if (mean.empty()) return x;
  if (x.cols() != mean.size()) {
    throw ShapeError("standardizer: fitted on " + std::to_string(mean.size()) +
                     " columns, got " + ShapeToString(x.shape()));
  }
  Tensor out = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out(i, j) = (x(i, j) - mean[j]) / scale[j];
    }
  }
  return out;
}

MlpClassifier MlpClassifier::Init(std::size_t input_dim, std::size_t n_classes,
                                  const ClassifierConfig& config,
                                  std::uint64_t seed) {
  config.Validate();
  if (input_dim == 0) throw ConfigError("classifier: input_dim must be > 0");
  if (n_classes < 2) throw ConfigError("classifier: needs >= 2 classes");
  std::vector<std::size_t> widths = {input_dim};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(n_classes);
  Rng rng = MakeRng(seed, SeedComponent::kModelInit);
  MlpClassifier c;
  c.net_ = Mlp("classifier", widths, Activation::kRelu, 0.0, rng);
  return c;
}

MlpClassifier MlpClassifier::Fit(const Tensor& x, std::span<const int> labels,
                                 std::size_t n_classes,
                                 const ClassifierConfig& config,
                                 std::uint64_t seed) {
  const std::size_t n = x.rows();
  if (n == 0) throw DataError("classifier: empty training set");
  if (labels.size() != n) {
    throw DataError("classifier: " + std::to_string(n) + " rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes) {
      throw DataError("classifier: label " + std::to_string(labels[i]) +
                      " at row " + std::to_string(i) + " outside [0, " +
                      std::to_string(n_classes) + ")");
    }
  }
  MlpClassifier c = Init(x.cols(), n_classes, config, seed);
  c.standardizer_ = Standardizer::Fit(x);
  const Tensor xs = c.standardizer_.Apply(x);

  std::vector<Parameter*> params;
  c.net_.AppendParameters(params);
  Adam adam(params, AdamOptions{.learning_rate = config.learning_rate});
  Tape tape;
  std::vector<std::size_t> order(n);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = MakeRng(seed, SeedComponent::kTrainShuffle,
                          static_cast<std::uint64_t>(epoch));
    FisherYatesShuffle(std::span<std::size_t>(order), shuffle);
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      const std::span<const std::size_t> rows(order.data() + begin,
                                              end - begin);
      std::vector<int> yb;
      yb.reserve(rows.size());
      for (std::size_t r : rows) yb.push_back(labels[r]);
      tape.Clear();
      Var logits = c.net_.Forward(tape, tape.Constant(SliceRows(xs, rows)));
      Var loss = SoftmaxCrossEntropy(logits, yb);
      if (!std::isfinite(loss.value().item())) {
        throw NumericalError("classifier: non-finite loss at epoch " +
                             std::to_string(epoch));
      }
      tape.Backward(loss);
      adam.Step();
    }
  }
  return c;
}

Tensor MlpClassifier::PredictProba(const Tensor& x) const {
  if (net_.empty()) throw ContractError("classifier: not initialized");
  return Softmax(net_.Forward(standardizer_.Apply(x)));
}

std::vector<int> MlpClassifier::Predict(const Tensor& x) const {
  return ArgmaxRows(PredictProba(x));
}

double MlpClassifier::Accuracy(const Tensor& x,
                               std::span<const int> labels) const {
  const std::vector<int> pred = Predict(x);
  if (pred.size() != labels.size()) {
    throw DataError("classifier: prediction and label counts differ");
  }
  if (pred.empty()) throw DataError("classifier: empty evaluation set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

double MajorityFraction(std::span<const int> labels) {
  if (labels.empty()) throw DataError("majority fraction of empty labels");
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::size_t best = 0;
  for (const auto& [label, count] : counts) best = std::max(best, count);
  return static_cast<double>(best) / static_cast<double>(labels.size());
}

RowSplit StratifiedRowSplit(std::span<const int> labels, double train_fraction,
                            std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    strata[labels[i]].push_back(i);
  }
  Rng rng = MakeRng(seed, SeedComponent::kSplit);
  RowSplit out;
  for (auto& [label, rows] : strata) {
    FisherYatesShuffle(std::span<std::size_t>(rows), rng);
    std::size_t n_train = rows.size();
    if (rows.size() >= 2) {
      n_train = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::round(train_fraction * rows.size())),
          1, rows.size() - 1);
    }
    out.train.insert(out.train.end(), rows.begin(), rows.begin() + n_train);
    out.test.insert(out.test.end(), rows.begin() + n_train, rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

AttackResult TrainAttacker(const Tensor& features, std::span<const int> s,
                           const ClassifierConfig& config, std::uint64_t seed) {
  if (features.rows() != s.size()) {
    throw DataError("attacker: " + std::to_string(features.rows()) +
                    " rows but " + std::to_string(s.size()) + " labels");
  }
  if (s.empty()) throw DataError("attacker: no rows");
  int max_label = 0;
  for (int l : s) {
    if (l < 0) throw DataError("attacker: negative sensitive label");
    max_label = std::max(max_label, l);
  }
  if (MajorityFraction(s) == 1.0) {
    throw DataError(
        "attacker: sensitive attribute holds a single class; the attack is "
        "degenerate");
  }
  AttackResult result;
  result.rows = StratifiedRowSplit(s, 0.8, seed);
  std::vector<int> s_train, s_test;
  for (std::size_t r : result.rows.train) s_train.push_back(s[r]);
  for (std::size_t r : result.rows.test) s_test.push_back(s[r]);
  result.attacker =
      MlpClassifier::Fit(SliceRows(features, result.rows.train), s_train,
                         static_cast<std::size_t>(max_label) + 1, config,
                         DeriveSeed(seed, SeedComponent::kAttacker));
  const Tensor x_test = SliceRows(features, result.rows.test);
  result.test_accuracy = result.attacker.Accuracy(x_test, s_test);
  result.chance = MajorityFraction(s_test);
  return result;
}

}  // namespace lsp
