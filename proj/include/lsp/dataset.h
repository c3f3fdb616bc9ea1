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

#ifndef LSP_DATASET_H_
#define LSP_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lsp/tensor.h"

namespace lsp {

enum class ColumnKind { kNumeric, kCategorical };

// One source feature column. A numeric column occupies one column of X; a
// categorical one occupies categories.size() one-hot columns of X.
struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Categorical coding in first-appearance order.
  std::vector<std::string> categories;
  // Original range of a numeric column, before any normalization.
  double min = 0.0;
  double max = 0.0;

  std::size_t width() const {
    return kind == ColumnKind::kNumeric ? 1 : categories.size();
  }
  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

struct Dataset {
  Tensor x;                    // n x d
  std::vector<int> y_util;     // downstream task label per row
  std::vector<int> s;          // sensitive label per row
  std::vector<ColumnMeta> columns;
  // Label coding maps (code -> original text), first-appearance order.
  std::string utility_name = "y";
  std::string sensitive_name = "s";
  std::vector<std::string> utility_classes;
  std::vector<std::string> sensitive_classes;
  std::optional<ImageShape> image_shape;

  std::size_t rows() const { return x.empty() ? 0 : x.rows(); }
  std::size_t cols() const { return x.empty() ? 0 : x.cols(); }
  std::size_t n_utility_classes() const;
  std::size_t n_sensitive_classes() const;

  // Throws a data error if row counts disagree or labels are out of range.
  void Validate() const;
  Dataset Subset(const std::vector<std::size_t>& rows) const;
};

// 64-bit FNV-1a over X, labels, and shape. Identifies a dataset for
// comparability checks between runs.
std::uint64_t Fingerprint(const Dataset& d);

// ---- Delimited text ----

// A column is referenced by header name or by zero-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

struct DelimitedSchema {
  char delimiter = ',';
  bool header = true;
  ColumnRef utility_column = std::size_t{0};
  ColumnRef sensitive_column = std::size_t{1};
  // Empty means every column that is not a label column.
  std::vector<ColumnRef> feature_columns;
  // Feature columns forced to categorical. Otherwise a column is
  // categorical iff some value fails to parse as a number.
  std::vector<ColumnRef> categorical_columns;
};

Dataset LoadDelimited(const std::filesystem::path& path,
                      const DelimitedSchema& schema);
// Writes features (categoricals collapsed back from one-hot) followed by the
// utility and sensitive label columns, with a header line.
void WriteDelimited(const Dataset& d, const std::filesystem::path& path,
                    char delimiter = ',');

// ---- IDX ----

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Pixels become row-major features scaled by 1/255; labels become y_util.
// The sensitive label is left as all zeros for the caller to assign.
Dataset LoadIdx(const std::filesystem::path& images,
                const std::filesystem::path& labels);

// ---- Synthetic data ----

struct SynthOptions {
  std::size_t n_per_class = 500;
  std::uint64_t seed = 0;
  // Informative features rendered from the 2-D moon coordinates.
  std::size_t informative_features = 8;
  // Extra uniform-noise columns (a wide tabular variant).
  std::size_t nuisance_features = 0;
};

// Two interleaved half-moons (utility label) drawn in two domains that
// differ by a fixed shift and a per-domain noise scale (sensitive label =
// domain). Rows alternate domains within each class; exactly n_per_class
// rows per utility class.
Dataset SynthTwoDomain(const SynthOptions& options);
inline Dataset SynthTwoDomain(std::size_t n_per_class, std::uint64_t seed) {
  return SynthTwoDomain(SynthOptions{n_per_class, seed});
}

// ---- Splitting and normalization ----

struct NormalizationStats {
  std::vector<double> min;
  std::vector<double> max;

  static NormalizationStats Fit(const Tensor& x);
  // (x - min) / (max - min); constant columns map to x - min.
  Tensor Apply(const Tensor& x) const;
};

struct Split {
  Dataset train;
  Dataset test;
  NormalizationStats stats;
  std::vector<std::size_t> train_rows;  // indices into the source dataset
  std::vector<std::size_t> test_rows;
};

// Stratified on (y_util, s); each stratum needs >= 2 rows and contributes at
// least one row to each side. Min-max stats are fitted on train only.
Split SplitNormalize(const Dataset& d, double train_fraction,
                     std::uint64_t seed);

}  // namespace lsp

#endif  // LSP_DATASET_H_
