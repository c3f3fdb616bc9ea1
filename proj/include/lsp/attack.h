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

#ifndef LSP_ATTACK_H_
#define LSP_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lsp/lsp_model.h"
#include "lsp/tensor.h"

namespace lsp {

// Fixed adversary / downstream architecture: ReLU MLP over z-scored inputs,
// softmax output, trained with Adam on cross-entropy.
struct ClassifierConfig {
  std::vector<std::size_t> hidden = {32, 32};
  int epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;

  void Validate() const;
};

// Per-column z-score transform; zero-variance columns keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer Fit(const Tensor& x);
  Tensor Apply(const Tensor& x) const;
};

class MlpClassifier {
 public:
  MlpClassifier() = default;

  // Untrained classifier with identity standardization. All randomness
  // derives from `seed`.
  static MlpClassifier Init(std::size_t input_dim, std::size_t n_classes,
                            const ClassifierConfig& config,
                            std::uint64_t seed);

  // Fits the standardizer on `x`, initializes from `seed`, and trains.
  // Labels must lie in [0, n_classes).
  static MlpClassifier Fit(const Tensor& x, std::span<const int> labels,
                           std::size_t n_classes,
                           const ClassifierConfig& config, std::uint64_t seed);

  Tensor PredictProba(const Tensor& x) const;
  std::vector<int> Predict(const Tensor& x) const;
  double Accuracy(const Tensor& x, std::span<const int> labels) const;

  std::size_t input_dim() const { return net_.input_width(); }
  std::size_t n_classes() const { return net_.output_width(); }

 private:
  Standardizer standardizer_;
  Mlp net_;
};

// Fraction of the most frequent label.
double MajorityFraction(std::span<const int> labels);

// Row indices of a stratified split; every class with at least two rows
// contributes at least one row to each side. Indices are sorted.
struct RowSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
RowSplit StratifiedRowSplit(std::span<const int> labels, double train_fraction,
                            std::uint64_t seed);

struct AttackResult {
  MlpClassifier attacker;
  double test_accuracy = 0.0;
  // Majority-class fraction on the held-out rows: the accuracy of an
  // attacker that ignores its input.
  double chance = 0.0;
  RowSplit rows;
};

// Attribute-inference attack: trains a fresh classifier to predict `s` from
// frozen `features` on a stratified 80/20 split and reports held-out
// accuracy. Throws a data error when `s` holds a single class.
AttackResult TrainAttacker(const Tensor& features, std::span<const int> s,
                           const ClassifierConfig& config, std::uint64_t seed);

}  // namespace lsp

#endif  // LSP_ATTACK_H_
