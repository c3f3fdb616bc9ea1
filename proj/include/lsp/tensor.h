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

#ifndef LSP_TENSOR_H_
#define LSP_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace lsp {

using Shape = std::vector<std::size_t>;

std::string ShapeToString(const Shape& shape);

// Dense row-major tensor of doubles. A plain value: it carries no gradient
// and no graph membership (see autodiff.h for the tape).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Scalar(double v);
  static Tensor FromRows(
      std::initializer_list<std::initializer_list<double>> rows);
  static Tensor Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  // Matrix accessors; rank must be 2.
  std::size_t rows() const;
  std::size_t cols() const;
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * shape_[1] + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * shape_[1] + c];
  }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols(), cols());
  }

  // Value of a single-element tensor.
  double item() const;

  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }
  void Fill(double v);

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  Shape shape_;
  std::vector<double> values_;
};

// Pure kernels over matrices. All throw a shape error on mismatch.
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& a);
Tensor AddRowVector(const Tensor& a, const Tensor& row);
Tensor SliceCols(const Tensor& a, std::size_t begin, std::size_t end);
Tensor SliceRows(const Tensor& a, std::span<const std::size_t> rows);
Tensor ConcatCols(const Tensor& a, const Tensor& b);
Tensor ConcatRows(const Tensor& a, const Tensor& b);
Tensor Identity(std::size_t n);

// Row-wise softmax.
Tensor Softmax(const Tensor& logits);
// Per-column (a - mean) / sqrt(var + eps) over rows, population variance.
Tensor StandardizeCols(const Tensor& a, double eps);
std::vector<int> ArgmaxRows(const Tensor& a);

double MeanSquaredError(const Tensor& a, const Tensor& b);

bool AllFinite(const Tensor& a);

}  // namespace lsp

#endif  // LSP_TENSOR_H_
