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

#include "lsp/k_anonymity.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>

#include "lsp/error.h"

namespace lsp {

namespace {

struct Mondrian {
  const Tensor& table;
  const std::vector<ColumnKind>& kinds;
  const std::vector<std::size_t>& quasi_ids;
  std::size_t k;
  std::vector<double> global_range;
  std::vector<std::vector<std::size_t>> leaves;

  double Range(const std::vector<std::size_t>& rows, std::size_t col) const {
    double lo = table(rows[0], col), hi = lo;
    for (std::size_t r : rows) {
      lo = std::min(lo, table(r, col));
      hi = std::max(hi, table(r, col));
    }
    return hi - lo;
  }

  void Partition(std::vector<std::size_t> rows) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t q = 0; q < quasi_ids.size(); ++q) {
      const std::size_t col = quasi_ids[q];
      const double g = global_range[q];
      order.push_back({g > 0.0 ? Range(rows, col) / g : 0.0, q});
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a,
                                                    const auto& b) {
      return a.first > b.first;
    });
    for (const auto& [width, q] : order) {
      if (width <= 0.0) break;
      const std::size_t col = quasi_ids[q];
      std::vector<double> vals;
      vals.reserve(rows.size());
      for (std::size_t r : rows) vals.push_back(table(r, col));
      std::sort(vals.begin(), vals.end());
      const double median = vals[(vals.size() - 1) / 2];
      std::vector<std::size_t> left, right;
      for (std::size_t r : rows) {
        (table(r, col) <= median ? left : right).push_back(r);
      }
      if (left.size() >= k && right.size() >= k) {
        Partition(std::move(left));
        Partition(std::move(right));
        return;
      }
    }
    leaves.push_back(std::move(rows));
  }
};

Generalization Generalize(const Tensor& table,
                          const std::vector<std::size_t>& rows,
                          std::size_t col, ColumnKind kind) {
  Generalization g;
  g.lo = table(rows[0], col);
  g.hi = g.lo;
  for (std::size_t r : rows) {
    g.lo = std::min(g.lo, table(r, col));
    g.hi = std::max(g.hi, table(r, col));
  }
  if (kind == ColumnKind::kCategorical) {
    std::set<double> codes;
    for (std::size_t r : rows) codes.insert(table(r, col));
    g.codes.assign(codes.begin(), codes.end());
  }
  return g;
}

double Representative(const Generalization& g, ColumnKind kind) {
  if (kind == ColumnKind::kNumeric) return 0.5 * (g.lo + g.hi);
  return std::accumulate(g.codes.begin(), g.codes.end(), 0.0) /
         static_cast<double>(g.codes.size());
}

}  // namespace

AnonymizedTable KAnonymize(const Tensor& table,
                           const std::vector<ColumnKind>& kinds,
                           const std::vector<std::size_t>& quasi_ids,
                           std::size_t k) {
  if (k < 2) {
    throw ConfigError("k-anonymity: k must be >= 2, got " + std::to_string(k));
  }
  if (quasi_ids.empty()) {
    throw ConfigError("k-anonymity: quasi_ids must be nonempty");
  }
  if (table.rank() != 2) {
    throw ShapeError("k-anonymity: table must be a matrix, got " +
                     ShapeToString(table.shape()));
  }
  const std::size_t n = table.rows();
  if (kinds.size() != table.cols()) {
    throw ConfigError("k-anonymity: " + std::to_string(kinds.size()) +
                      " column kinds for " + std::to_string(table.cols()) +
                      " columns");
  }
  for (std::size_t q : quasi_ids) {
    if (q >= table.cols()) {
      throw ConfigError("k-anonymity: quasi-identifier column " +
                        std::to_string(q) + " out of range");
    }
  }

  AnonymizedTable out;
  out.values = table;
  out.k = k;
  out.quasi_ids = quasi_ids;
  out.generalized.assign(n, {});
  out.class_id.assign(n, kSuppressed);
  if (n == 0) return out;

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<Generalization> whole;
  for (std::size_t col : quasi_ids) {
    whole.push_back(Generalize(table, all, col, kinds[col]));
  }

  auto assign = [&](const std::vector<std::size_t>& rows,
                    const std::vector<Generalization>& gen) {
    for (std::size_t r : rows) {
      out.generalized[r] = gen;
      for (std::size_t q = 0; q < quasi_ids.size(); ++q) {
        out.values(r, quasi_ids[q]) =
            Representative(gen[q], kinds[quasi_ids[q]]);
      }
    }
  };

  if (n < k) {
    assign(all, whole);
    out.suppressed_count = n;
    return out;
  }

  Mondrian m{table, kinds, quasi_ids, k, {}, {}};
  for (const Generalization& g : whole) m.global_range.push_back(g.hi - g.lo);
  m.Partition(all);

  for (const std::vector<std::size_t>& leaf : m.leaves) {
    if (leaf.size() < k) {
      assign(leaf, whole);
      out.suppressed_count += leaf.size();
      continue;
    }
    std::vector<Generalization> gen;
    for (std::size_t col : quasi_ids) {
      gen.push_back(Generalize(table, leaf, col, kinds[col]));
    }
    assign(leaf, gen);
    for (std::size_t r : leaf) out.class_id[r] = out.n_classes;
    ++out.n_classes;
  }
  return out;
}

std::size_t MinEquivalenceClassSize(const AnonymizedTable& t) {
  auto less = [](const std::vector<Generalization>& a,
                 const std::vector<Generalization>& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [](const Generalization& x, const Generalization& y) {
          return std::tie(x.lo, x.hi, x.codes) < std::tie(y.lo, y.hi, y.codes);
        });
  };
  std::map<std::vector<Generalization>, std::size_t, decltype(less)> classes(
      less);
  for (std::size_t r = 0; r < t.class_id.size(); ++r) {
    if (t.class_id[r] == kSuppressed) continue;
    ++classes[t.generalized[r]];
  }
  std::size_t best = 0;
  for (const auto& [key, count] : classes) {
    best = best == 0 ? count : std::min(best, count);
  }
  return best;
}

}  // namespace lsp
