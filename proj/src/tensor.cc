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

#include "lsp/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "lsp/error.h"

namespace lsp {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kData:
      return "data";
    case ErrorKind::kShape:
      return "shape";
    case ErrorKind::kContract:
      return "contract";
    case ErrorKind::kNumerical:
      return "numerical";
    case ErrorKind::kFormat:
      return "format";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

std::size_t ShapeProduct(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void RequireMatrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got shape " +
                     ShapeToString(t.shape()));
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(ShapeProduct(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (ShapeProduct(shape_) != values_.size()) {
    throw ShapeError("tensor shape " + ShapeToString(shape_) + " needs " +
                     std::to_string(ShapeProduct(shape_)) + " values, got " +
                     std::to_string(values_.size()));
  }
}

Tensor Tensor::Scalar(double v) { return Tensor({1}, std::vector<double>{v}); }

Tensor Tensor::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("FromRows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(values));
}

std::size_t Tensor::rows() const {
  RequireMatrix(*this, "rows");
  return shape_[0];
}

std::size_t Tensor::cols() const {
  RequireMatrix(*this, "cols");
  return shape_[1];
}

double Tensor::item() const {
  if (values_.size() != 1) {
    throw ContractError("item() on tensor of shape " + ShapeToString(shape_));
  }
  return values_[0];
}

void Tensor::Fill(double v) { std::fill(values_.begin(), values_.end(), v); }

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "matmul");
  RequireMatrix(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw ShapeError("matmul: inner dimensions disagree: " +
                     ShapeToString(a.shape()) + " * " +
                     ShapeToString(b.shape()));
  }
  Tensor out({m, n}, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  auto ov = out.mutable_values();
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = ov.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return out;
}

Tensor Transpose(const Tensor& a) {
  RequireMatrix(a, "transpose");
  Tensor out({a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

Tensor AddRowVector(const Tensor& a, const Tensor& row) {
  RequireMatrix(a, "add_bias");
  if (row.size() != a.cols()) {
    throw ShapeError("add_bias: bias " + ShapeToString(row.shape()) +
                     " does not match " + ShapeToString(a.shape()));
  }
  Tensor out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += row[j];
  }
  return out;
}

Tensor SliceCols(const Tensor& a, std::size_t begin, std::size_t end) {
  RequireMatrix(a, "slice_cols");
  if (begin > end || end > a.cols()) {
    throw ShapeError("slice_cols: [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") out of range for " +
                     ShapeToString(a.shape()));
  }
  Tensor out({a.rows(), end - begin});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = a(i, j);
  }
  return out;
}

Tensor SliceRows(const Tensor& a, std::span<const std::size_t> rows) {
  RequireMatrix(a, "slice_rows");
  Tensor out({rows.size(), a.cols()});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) {
      throw ShapeError("slice_rows: row " + std::to_string(rows[i]) +
                       " out of range for " + ShapeToString(a.shape()));
    }
    std::copy_n(a.values().begin() + rows[i] * a.cols(), a.cols(),
                out.mutable_values().begin() + i * a.cols());
  }
  return out;
}

Tensor ConcatCols(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "concat_cols");
  RequireMatrix(b, "concat_cols");
  if (a.rows() != b.rows()) {
    throw ShapeError("concat_cols: row counts differ: " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
  Tensor out({a.rows(), a.cols() + b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

Tensor ConcatRows(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "concat_rows");
  RequireMatrix(b, "concat_rows");
  if (a.cols() != b.cols()) {
    throw ShapeError("concat_rows: column counts differ: " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
  std::vector<double> values(a.values().begin(), a.values().end());
  values.insert(values.end(), b.values().begin(), b.values().end());
  return Tensor({a.rows() + b.rows(), a.cols()}, std::move(values));
}

Tensor Identity(std::size_t n) {
  Tensor out({n, n}, 0.0);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Tensor StandardizeCols(const Tensor& a, double eps) {
  if (a.rank() != 2 || a.rows() == 0) {
    throw ShapeError("standardize_cols: needs a non-empty matrix, got " +
                     ShapeToString(a.shape()));
  }
  const std::size_t n = a.rows(), d = a.cols();
  Tensor out = a;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      var += (a(i, j) - mean) * (a(i, j) - mean);
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = (a(i, j) - mean) * inv;
  }
  return out;
}

Tensor Softmax(const Tensor& logits) {
  RequireMatrix(logits, "softmax");
  Tensor out = logits;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double mx = out(i, 0);
    for (std::size_t j = 1; j < out.cols(); ++j) mx = std::max(mx, out(i, j));
    double total = 0.0;
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) = std::exp(out(i, j) - mx);
      total += out(i, j);
    }
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) /= total;
  }
  return out;
}

std::vector<int> ArgmaxRows(const Tensor& a) {
  RequireMatrix(a, "argmax");
  std::vector<int> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < a.cols(); ++j) {
      if (a(i, j) > a(i, best)) best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

double MeanSquaredError(const Tensor& a, const Tensor& b) {
  if (!a.SameShape(b)) {
    throw ShapeError("mse: shapes differ: " + ShapeToString(a.shape()) +
                     " vs " + ShapeToString(b.shape()));
  }
  if (a.empty()) throw ContractError("mse of empty tensors");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total / static_cast<double>(a.size());
}

bool AllFinite(const Tensor& a) {
  return std::all_of(a.values().begin(), a.values().end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace lsp
