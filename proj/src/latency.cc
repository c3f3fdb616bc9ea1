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

#include "lsp/latency.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include "lsp/error.h"
#include "lsp/random.h"

namespace lsp {

void LatencyOptions::Validate() const {
  if (repetitions < 5) {
    throw ConfigError("latency: repetitions must be >= 5, got " +
                      std::to_string(repetitions));
  }
  if (batch_sizes.empty()) throw ConfigError("latency: no batch sizes");
  for (std::size_t i = 0; i < batch_sizes.size(); ++i) {
    if (batch_sizes[i] == 0) throw ConfigError("latency: batch size 0");
    if (i > 0 && batch_sizes[i] <= batch_sizes[i - 1]) {
      throw ConfigError("latency: batch sizes must be strictly increasing");
    }
  }
}

double LinearFitR2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DataError("linear fit: need >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DataError("linear fit: x is constant");
  if (syy == 0.0) return 1.0;
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    ss_res += r * r;
  }
  return 1.0 - ss_res / syy;
}

double MeasureTimerResolutionMs() {
  using Clock = std::chrono::steady_clock;
  auto best = Clock::duration::max();
  for (int i = 0; i < 200; ++i) {
    const auto t0 = Clock::now();
    auto t1 = Clock::now();
    while (t1 == t0) t1 = Clock::now();
    best = std::min(best, t1 - t0);
  }
  return std::chrono::duration<double, std::milli>(best).count();
}

namespace {

LatencyRow TimeStage(const std::string& stage, std::size_t batch_size,
                     const LatencyOptions& options,
                     const std::function<void()>& run) {
  using Clock = std::chrono::steady_clock;
  LatencyRow row;
  row.stage = stage;
  row.batch_size = batch_size;
  for (std::size_t i = 0; i < options.warmup; ++i) run();
  for (std::size_t i = 0; i < options.repetitions; ++i) {
    const auto t0 = Clock::now();
    run();
    const auto t1 = Clock::now();
    row.samples_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  const double n = static_cast<double>(row.samples_ms.size());
  for (double s : row.samples_ms) row.mean_ms += s;
  row.mean_ms /= n;
  double ss = 0.0;
  for (double s : row.samples_ms) ss += (s - row.mean_ms) * (s - row.mean_ms);
  row.stddev_ms = std::sqrt(ss / (n - 1.0));
  return row;
}

}  // namespace

LatencyReport RunLatencyBench(const LspModel& model,
                              const MlpClassifier* downstream,
                              const LatencyOptions& options,
                              std::uint64_t seed) {
  options.Validate();
  const ModelDims& dims = model.dims();
  MlpClassifier fallback;
  if (downstream == nullptr) {
    fallback = MlpClassifier::Init(dims.z_ns_dim, 2, ClassifierConfig{},
                                   DeriveSeed(seed, SeedComponent::kDownstream));
    downstream = &fallback;
  }
  if (downstream->input_dim() != dims.z_ns_dim) {
    throw ShapeError("latency: downstream classifier expects " +
                     std::to_string(downstream->input_dim()) +
                     " inputs, z_ns has " + std::to_string(dims.z_ns_dim));
  }

  LatencyReport report;
  report.header = kLatencyHeader;
  report.hardware = options.hardware;
  if (options.hardware.empty()) {
    report.warnings.push_back("no hardware description supplied");
  }
  report.timer_resolution_ms = MeasureTimerResolutionMs();

  Rng rng = MakeRng(seed, SeedComponent::kBench);
  // Sink that keeps the optimizer from discarding timed work.
  volatile double sink = 0.0;
  std::vector<LatencyRow> encode_rows, process_rows, decode_rows;
  for (std::size_t b : options.batch_sizes) {
    Tensor x({b, dims.input_dim});
    for (double& v : x.mutable_values()) v = UniformUnit(rng);
    const LatentCode code = model.Encode(x);
    encode_rows.push_back(TimeStage("encode", b, options, [&] {
      sink = sink + model.Encode(x).z_ns.values()[0];
    }));
    if (options.include_process) {
      process_rows.push_back(TimeStage("process", b, options, [&] {
        sink = sink + downstream->PredictProba(code.z_ns).values()[0];
      }));
    }
    if (options.include_decode) {
      decode_rows.push_back(TimeStage("decode", b, options, [&] {
        sink = sink + model.Decode(code).values()[0];
      }));
    }
  }
  for (auto* group : {&encode_rows, &process_rows, &decode_rows}) {
    for (LatencyRow& row : *group) {
      const double fastest =
          *std::min_element(row.samples_ms.begin(), row.samples_ms.end());
      if (fastest < report.timer_resolution_ms) {
        report.warnings.push_back(
            "timer resolution " + std::to_string(report.timer_resolution_ms) +
            " ms is coarser than a measured " + row.stage + " interval at batch " +
            std::to_string(row.batch_size));
      }
      report.rows.push_back(std::move(row));
    }
  }
  if (options.batch_sizes.size() >= 2) {
    std::vector<double> xs, ys;
    for (const LatencyRow& row : report.rows) {
      if (row.stage != "encode") continue;
      xs.push_back(static_cast<double>(row.batch_size));
      ys.push_back(row.mean_ms);
    }
    report.encode_linear_r2 = LinearFitR2(xs, ys);
  } else {
    report.encode_linear_r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace lsp
