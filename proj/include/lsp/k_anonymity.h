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

#ifndef LSP_K_ANONYMITY_H_
#define LSP_K_ANONYMITY_H_

#include <cstddef>
#include <limits>
#include <vector>

#include "lsp/dataset.h"
#include "lsp/tensor.h"

namespace lsp {

// Generalized value of one quasi-identifier cell: the closed interval
// [lo, hi] for a numeric column, or the sorted set of codes for a
// categorical one.
struct Generalization {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> codes;  // categorical only

  friend bool operator==(const Generalization&,
                         const Generalization&) = default;
};

inline constexpr std::size_t kSuppressed =
    std::numeric_limits<std::size_t>::max();

struct AnonymizedTable {
  // Input table with each quasi-identifier cell replaced by a numeric
  // stand-in for its generalization: the interval midpoint, or the mean of
  // the code set. Suppressed rows carry the whole-table generalization.
  Tensor values;
  // generalized[r][q] for row r and the q-th quasi-identifier.
  std::vector<std::vector<Generalization>> generalized;
  // Equivalence class per row, kSuppressed for suppressed rows.
  std::vector<std::size_t> class_id;
  std::size_t n_classes = 0;
  std::size_t suppressed_count = 0;
  std::size_t k = 0;
  std::vector<std::size_t> quasi_ids;
};

// Mondrian multidimensional partitioning. Each partition is split at the
// lower median of one quasi-identifier (left side <= median) when both
// sides keep >= k rows; candidate columns are tried in order of widest
// range normalized by the whole-table range, ties to the lowest index.
// Categorical columns hold integer codes and split on code order.
// Throws a config error for k < 2, an empty or out-of-range quasi_ids list,
// or a kinds list that does not match the column count. A table with fewer
// than k rows is suppressed entirely.
AnonymizedTable KAnonymize(const Tensor& table,
                           const std::vector<ColumnKind>& kinds,
                           const std::vector<std::size_t>& quasi_ids,
                           std::size_t k);

// Smallest equivalence class over the generalized quasi-identifier values of
// unsuppressed rows, found by direct comparison. 0 when every row is
// suppressed.
std::size_t MinEquivalenceClassSize(const AnonymizedTable& t);

}  // namespace lsp

#endif  // LSP_K_ANONYMITY_H_
