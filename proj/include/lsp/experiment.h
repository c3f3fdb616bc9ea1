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

#ifndef LSP_EXPERIMENT_H_
#define LSP_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lsp/attack.h"
#include "lsp/dataset.h"
#include "lsp/dp_noise.h"
#include "lsp/error.h"
#include "lsp/latency.h"
#include "lsp/lsp_model.h"
#include "lsp/report.h"
#include "lsp/training.h"

namespace lsp {

enum class Method { kLsp, kRaw, kKAnonymity, kDp };
const char* MethodName(Method m);

enum class DataSource { kSynthetic, kDelimited, kIdx };

struct RunConfig {
  std::string experiment = "run";
  std::optional<std::uint64_t> seed;
  Method method = Method::kLsp;

  DataSource source = DataSource::kSynthetic;
  double train_fraction = 0.8;
  SynthOptions synth;
  bool synth_seed_set = false;  // otherwise the run seed is used
  std::filesystem::path data_path;
  DelimitedSchema schema;
  // Two IDX pairs; the sensitive label is the pair of origin (0 or 1).
  std::filesystem::path idx_images[2];
  std::filesystem::path idx_labels[2];
  std::size_t idx_limit = 0;  // rows kept per pair, 0 = all

  TrainConfig lsp;
  std::size_t k = 5;
  std::vector<std::size_t> quasi_ids;  // empty = every feature column
  DpParams dp{.epsilon = 10.0};
  ClassifierConfig classifier;

  bool eval_fidelity = false;
  bool eval_fairness = false;
  bool eval_latency = false;
  LatencyOptions bench;

  std::filesystem::path out_dir = "out";
  std::vector<std::filesystem::path> compare_reports;
  std::vector<std::filesystem::path> compare_configs;
  bool compare_parallel = false;

  // Effective settings as sorted key=value pairs, including defaults.
  std::vector<std::pair<std::string, std::string>> Canonical() const;
  // FNV-1a over Canonical().
  std::uint64_t Fingerprint() const;
  std::uint64_t run_seed() const;
};

// Flat key=value text; '#' starts a comment line. Unknown keys, duplicate
// keys, malformed values and a missing seed are config errors. Relative
// paths resolve against `base_dir`.
RunConfig ParseRunConfig(const std::string& text,
                         const std::filesystem::path& base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);

// The full dataset named by the config, before splitting.
Dataset LoadRunDataset(const RunConfig& config);

// Stratified split and min-max normalization used by every subcommand.
Split SplitForRun(const RunConfig& config, const Dataset& data);

std::vector<KvRecord> HistoryRecords(const RunConfig& config,
                                     std::uint64_t dataset_fingerprint,
                                     const std::vector<EpochStats>& history);

// Obfuscated release of `x` under the run's method: z_ns for LSP, the
// perturbed or generalized matrix for the baselines, x itself for raw.
// `x` is the normalized feature matrix of all released rows.
Tensor ReleaseFeatures(const RunConfig& config, const Tensor& x,
                       const LspModel* model);

// Evaluation pipeline: split, release, downstream utility classifier on the
// released train split, attribute-inference attacks on raw and released
// features, optional fidelity / fairness / latency.
MetricsReport EvaluateRun(const RunConfig& config, const Dataset& data,
                          const LspModel* model);

struct BenchOutput {
  LatencyReport latency;
  std::vector<KvRecord> records;
  std::string text;
};
BenchOutput BenchRun(const RunConfig& config, const LspModel& model);

// Subcommands. Each writes its outputs under `out_dir` (created if needed).
// model.lspm + history.kv
void CmdTrain(const RunConfig& config, const std::filesystem::path& out_dir);
// report.kv + report.txt; `model_path` is required for method lsp.
MetricsReport CmdEval(const RunConfig& config,
                      const std::filesystem::path& model_path,
                      const std::filesystem::path& out_dir);
// compare.kv + compare.txt
std::vector<MetricsReport> CmdCompare(const RunConfig& config,
                                      const std::filesystem::path& out_dir);
// bench.kv + bench.txt
BenchOutput CmdBench(const RunConfig& config,
                     const std::filesystem::path& model_path,
                     const std::filesystem::path& out_dir);

// 0 success, 2 config, 3 data (including format and I/O), 4 numerical,
// 1 anything else.
int ExitCodeFor(ErrorKind kind);

}  // namespace lsp

#endif  // LSP_EXPERIMENT_H_
