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

#include "lsp/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "lsp/error.h"
#include "lsp/model_io.h"

namespace lsp {

void TrainConfig::Validate() const {
  if (z_ns_dim == 0) throw ConfigError("z_ns_dim must be positive");
  if (!(lambda_priv >= 0.0)) throw ConfigError("lambda_priv must be >= 0");
  if (!(alpha_sens >= 0.0)) throw ConfigError("alpha_sens must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(disc_lr_scale > 0.0)) throw ConfigError("disc_lr_scale must be > 0");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

LossGraph BuildLossGraph(Tape& tape, LspModel& model, const Tensor& x,
                         std::span<const int> s, const TrainConfig& config,
                         Rng* dropout_rng) {
  const ModelDims& dims = model.dims();
  if (x.rank() != 2 || x.rows() == 0) {
    throw ContractError("loss_total: empty batch");
  }
  if (x.rows() != s.size()) {
    throw ShapeError("loss_total: " + std::to_string(x.rows()) + " rows vs " +
                     std::to_string(s.size()) + " labels");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || static_cast<std::size_t>(s[i]) >= dims.n_sensitive_classes) {
      throw DataError("sensitive label " + std::to_string(s[i]) + " at row " +
                      std::to_string(i) + " outside [0, " +
                      std::to_string(dims.n_sensitive_classes) + ")");
    }
  }

  LossGraph g;
  const Var xv = tape.Constant(x);
  const Var z = model.encoder().Forward(tape, xv);
  const Var z_s = SliceCols(z, 0, dims.z_s_dim);
  const Var z_ns = SliceCols(z, dims.z_s_dim, dims.latent_dim());
  const Var recon_x = model.decoder().Forward(tape, z);
  g.recon = MseLoss(recon_x, xv);

  g.disc_logits = model.discriminator().Forward(
      tape,
      StandardizeCols(GradReverse(z_ns, config.lambda_priv),
                      LspModel::kDiscriminatorInputEps),
      dropout_rng != nullptr,
      dropout_rng);
  g.adv = SoftmaxCrossEntropy(g.disc_logits, s);
  g.total = Add(g.recon, g.adv);

  if (dims.z_s_dim > 0) {
    g.sens = SoftmaxCrossEntropy(model.sens_head().Forward(tape, z_s), s);
    g.total = Add(g.total, Scale(g.sens, config.alpha_sens));
  }
  return g;
}

LossComponents LossTotal(LspModel& model, const Tensor& x,
                         std::span<const int> s, const TrainConfig& config,
                         Rng* dropout_rng) {
  Tape tape;
  const LossGraph g = BuildLossGraph(tape, model, x, s, config, dropout_rng);
  LossComponents c;
  c.total = g.total.value().item();
  c.recon = g.recon.value().item();
  c.adv = g.adv.value().item();
  c.sens = model.dims().z_s_dim > 0 ? g.sens.value().item() : 0.0;
  return c;
}

ModelDims DimsFor(const Dataset& train, const TrainConfig& config) {
  ModelDims dims;
  dims.input_dim = train.cols();
  dims.z_s_dim = config.z_s_dim;
  dims.z_ns_dim = config.z_ns_dim;
  dims.n_sensitive_classes = std::max<std::size_t>(2, train.n_sensitive_classes());
  return dims;
}

namespace {

AdamOptions OptionsFor(const TrainConfig& config) {
  AdamOptions o;
  o.learning_rate = config.learning_rate;
  o.float32_storage = true;
  return o;
}

std::vector<double> LrScalesFor(LspModel& model, const TrainConfig& config) {
  std::vector<Parameter*> disc;
  model.discriminator().AppendParameters(disc);
  std::vector<double> scales;
  for (const Parameter* p : model.Parameters()) {
    const bool is_disc = std::find(disc.begin(), disc.end(), p) != disc.end();
    scales.push_back(is_disc ? config.disc_lr_scale : 1.0);
  }
  return scales;
}

}  // namespace

Trainer::Trainer(LspModel& model, TrainConfig config)
    : model_(model),
      config_(config),
      adam_(model.Parameters(), OptionsFor(config),
            LrScalesFor(model, config)) {
  config_.Validate();
}

EpochStats Trainer::TrainEpoch(const Dataset& data, int epoch) {
  data.Validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = data.rows();
  if (n == 0) throw DataError("train_epoch: empty dataset");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng = MakeRng(config_.seed, SeedComponent::kTrainShuffle,
                            static_cast<std::uint64_t>(epoch));
  FisherYatesShuffle(std::span<std::size_t>(order), shuffle_rng);
  Rng dropout_rng = MakeRng(config_.seed, SeedComponent::kDropout,
                            static_cast<std::uint64_t>(epoch));

  EpochStats stats;
  stats.epoch = epoch;
  std::size_t correct = 0;
  std::size_t batch_index = 0;
  for (std::size_t begin = 0; begin < n; begin += config_.batch_size) {
    const std::size_t end = std::min(n, begin + config_.batch_size);
    const std::span<const std::size_t> rows(order.data() + begin, end - begin);
    const Tensor xb = SliceRows(data.x, rows);
    std::vector<int> sb;
    sb.reserve(rows.size());
    for (std::size_t r : rows) sb.push_back(data.s[r]);

    tape_.Clear();
    const LossGraph g =
        BuildLossGraph(tape_, model_, xb, sb, config_, &dropout_rng);
    const double total = g.total.value().item();
    if (!std::isfinite(total)) {
      throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index));
    }
    tape_.Backward(g.total);
    adam_.Step();

    const double weight = static_cast<double>(rows.size());
    stats.recon_loss += weight * g.recon.value().item();
    stats.disc_loss += weight * g.adv.value().item();
    if (model_.dims().z_s_dim > 0) {
      stats.sens_loss += weight * g.sens.value().item();
    }
    const std::vector<int> pred = ArgmaxRows(g.disc_logits.value());
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == sb[i]) ++correct;
    }
    ++batch_index;
  }
  tape_.Clear();
  const double dn = static_cast<double>(n);
  stats.recon_loss /= dn;
  stats.disc_loss /= dn;
  stats.sens_loss /= dn;
  stats.disc_train_accuracy = static_cast<double>(correct) / dn;
  stats.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return stats;
}

TrainResult Train(const Dataset& data, const TrainConfig& config,
                  const std::filesystem::path& checkpoint_dir) {
  config.Validate();
  return Train(LspModel::Init(DimsFor(data, config), config.seed), data,
               config, checkpoint_dir);
}

TrainResult Train(LspModel model, const Dataset& data,
                  const TrainConfig& config,
                  const std::filesystem::path& checkpoint_dir) {
  TrainResult result;
  {
    Trainer trainer(model, config);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      result.history.push_back(trainer.TrainEpoch(data, epoch));
      if (config.checkpoint_every > 0 && !checkpoint_dir.empty() &&
          epoch % config.checkpoint_every == 0) {
        char name[64];
        std::snprintf(name, sizeof(name), "checkpoint_epoch_%04d.lspm", epoch);
        SaveModel(model, checkpoint_dir / name);
      }
    }
  }
  result.model = std::move(model);
  return result;
}

}  // namespace lsp
