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

#ifndef LSP_LATENCY_H_
#define LSP_LATENCY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lsp/attack.h"
#include "lsp/lsp_model.h"

namespace lsp {

struct LatencyOptions {
  // Strictly increasing.
  std::vector<std::size_t> batch_sizes = {1, 8, 64, 512};
  std::size_t repetitions = 5;  // recorded samples per cell, >= 5
  std::size_t warmup = 2;       // discarded runs per cell
  bool include_process = true;
  bool include_decode = true;
  std::string hardware;  // free-form description echoed into the report

  void Validate() const;
};

struct LatencyRow {
  std::string stage;  // "encode", "process" or "decode"
  std::size_t batch_size = 0;
  std::vector<double> samples_ms;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;  // sample standard deviation
};

struct LatencyReport {
  std::string header;
  std::string hardware;
  double timer_resolution_ms = 0.0;
  std::vector<LatencyRow> rows;
  std::vector<std::string> warnings;
  // R^2 of the least-squares line through (batch_size, encode mean_ms).
  double encode_linear_r2 = 0.0;
};

inline constexpr char kLatencyHeader[] =
    "latency bench: single-threaded, wall clock, no concurrent load";

// Times encode (x -> z), process (downstream classifier on z_ns) and decode
// (z -> x') for each batch size on seeded uniform inputs. The process stage
// uses `downstream` when given, otherwise a fixed untrained classifier of
// the standard architecture.
LatencyReport RunLatencyBench(const LspModel& model,
                              const MlpClassifier* downstream,
                              const LatencyOptions& options,
                              std::uint64_t seed);

// Coefficient of determination of the least-squares fit y = a + b x.
// Returns 1 when y is constant and fitted exactly.
double LinearFitR2(std::span<const double> x, std::span<const double> y);

// Smallest observable positive steady_clock increment, in milliseconds.
double MeasureTimerResolutionMs();

}  // namespace lsp

#endif  // LSP_LATENCY_H_
