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

#ifndef LSP_TRAINING_H_
#define LSP_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lsp/adam.h"
#include "lsp/autodiff.h"
#include "lsp/dataset.h"
#include "lsp/lsp_model.h"

namespace lsp {

struct TrainConfig {
  std::size_t z_s_dim = 2;
  std::size_t z_ns_dim = 8;
  double lambda_priv = 0.2;  // privacy weight, gradient-reversal scale
  double alpha_sens = 1.0;   // weight of the sensitive-head loss on z_s
  int epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  // The discriminator steps at disc_lr_scale * learning_rate.
  double disc_lr_scale = 20.0;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // 0 = never

  void Validate() const;
};

struct EpochStats {
  int epoch = 0;
  double recon_loss = 0.0;
  double disc_loss = 0.0;
  double sens_loss = 0.0;
  double disc_train_accuracy = 0.0;
  double wall_time_ms = 0.0;
};

struct LossComponents {
  double total = 0.0;
  double recon = 0.0;  // MSE(x, decode(encode(x)))
  double sens = 0.0;   // CE(sens_head(z_s), s), before alpha weighting
  double adv = 0.0;    // CE(discriminate(z_ns), s)
};

// Nodes of one training forward pass.
struct LossGraph {
  Var total;
  Var recon;
  Var sens;  // unset when z_s_dim == 0
  Var adv;
  Var disc_logits;
};

// Builds
//   L = MSE(x, D(E(x))) + alpha * CE(H(z_s), s) + CE(P(R_lambda(z_ns)), s)
// where R_lambda is the gradient-reversal layer. The discriminator descends
// its cross-entropy while the encoder, through R_lambda, ascends it.
// `dropout_rng` null means the discriminator runs without dropout.
LossGraph BuildLossGraph(Tape& tape, LspModel& model, const Tensor& x,
                         std::span<const int> s, const TrainConfig& config,
                         Rng* dropout_rng);

LossComponents LossTotal(LspModel& model, const Tensor& x,
                         std::span<const int> s, const TrainConfig& config,
                         Rng* dropout_rng = nullptr);

ModelDims DimsFor(const Dataset& train, const TrainConfig& config);

// Owns the optimizer for one model; all four networks are updated jointly,
// one Adam step per minibatch.
class Trainer {
 public:
  Trainer(LspModel& model, TrainConfig config);

  // One pass over minibatches of a permutation derived from (seed, epoch).
  // `epoch` is 1-based. Aborts with a numerical error on a NaN loss.
  EpochStats TrainEpoch(const Dataset& data, int epoch);

  const Adam& optimizer() const { return adam_; }

 private:
  LspModel& model_;
  TrainConfig config_;
  Adam adam_;
  Tape tape_;
};

struct TrainResult {
  LspModel model;
  std::vector<EpochStats> history;
};

// Runs config.epochs epochs on a model initialized from config.seed. When
// checkpoint_every > 0 and `checkpoint_dir` is set, writes
// checkpoint_epoch_NNNN.lspm every checkpoint_every epochs.
TrainResult Train(const Dataset& data, const TrainConfig& config,
                  const std::filesystem::path& checkpoint_dir = {});
TrainResult Train(LspModel model, const Dataset& data,
                  const TrainConfig& config,
                  const std::filesystem::path& checkpoint_dir = {});

}  // namespace lsp

#endif  // LSP_TRAINING_H_
