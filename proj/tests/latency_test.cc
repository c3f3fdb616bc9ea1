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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "lsp/error.h"
#include "lsp/lsp_model.h"

namespace lsp {
namespace {

LspModel SmallModel() {
  ModelDims dims;
  dims.input_dim = 6;
  dims.z_s_dim = 2;
  dims.z_ns_dim = 4;
  return LspModel::Init(dims, 3);
}

std::vector<std::string> Stages(const LatencyReport& r) {
  std::vector<std::string> out;
  for (const LatencyRow& row : r.rows) {
    if (out.empty() || out.back() != row.stage) out.push_back(row.stage);
  }
  return out;
}

TEST(LinearFitR2Test, ExactLineIsOne) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {3, 5, 7, 9};
  EXPECT_NEAR(LinearFitR2(x, y), 1.0, 1e-12);
}

TEST(LinearFitR2Test, MatchesHandComputation) {
  const std::vector<double> x = {0, 1, 2};
  const std::vector<double> y = {0, 3, 3};
  // Least squares: slope 1.5, intercept 0.5, predictions 0.5, 2, 3.5.
  const double ss_res = 0.25 + 1.0 + 0.25;
  const double ss_tot = 4.0 + 1.0 + 1.0;
  EXPECT_NEAR(LinearFitR2(x, y), 1.0 - ss_res / ss_tot, 1e-12);
}

TEST(LatencyOptionsTest, RejectsTooFewRepetitionsAndUnsortedBatches) {
  LatencyOptions few;
  few.repetitions = 4;
  LatencyOptions unsorted;
  unsorted.batch_sizes = {8, 1};
  LatencyOptions zero;
  zero.batch_sizes = {0, 4};
  for (const LatencyOptions* o : {&few, &unsorted, &zero}) {
    try {
      o->Validate();
      FAIL() << "expected a config error";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    }
  }
}

TEST(RunLatencyBenchTest, RecordsExactlyRepetitionSamplesPerCell) {
  LatencyOptions o;
  o.batch_sizes = {1, 10, 100};
  o.hardware = "test machine";
  const LatencyReport r = RunLatencyBench(SmallModel(), nullptr, o, 1);
  EXPECT_EQ(r.header, kLatencyHeader);
  EXPECT_EQ(r.hardware, "test machine");
  EXPECT_EQ(Stages(r),
            (std::vector<std::string>{"encode", "process", "decode"}));
  ASSERT_EQ(r.rows.size(), 9u);
  for (const LatencyRow& row : r.rows) {
    EXPECT_EQ(row.samples_ms.size(), 5u);
    double sum = 0.0;
    for (double v : row.samples_ms) sum += v;
    EXPECT_NEAR(row.mean_ms, sum / 5.0, 1e-12);
    EXPECT_GE(row.stddev_ms, 0.0);
  }
  EXPECT_EQ(r.rows[0].batch_size, 1u);
  EXPECT_EQ(r.rows[2].batch_size, 100u);
}

TEST(RunLatencyBenchTest, DecodeRowsOmittedWhenNotRequested) {
  LatencyOptions o;
  o.batch_sizes = {1, 4};
  o.include_decode = false;
  const LatencyReport r = RunLatencyBench(SmallModel(), nullptr, o, 1);
  EXPECT_EQ(Stages(r), (std::vector<std::string>{"encode", "process"}));
}

TEST(RunLatencyBenchTest, MissingHardwareDescriptionIsWarned) {
  LatencyOptions o;
  o.batch_sizes = {1};
  const LatencyReport r = RunLatencyBench(SmallModel(), nullptr, o, 1);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(MeasureTimerResolutionTest, IsPositiveAndSmall) {
  const double res = MeasureTimerResolutionMs();
  EXPECT_GT(res, 0.0);
  EXPECT_LT(res, 20.0);
}

}  // namespace
}  // namespace lsp
