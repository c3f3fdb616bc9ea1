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

#ifndef LSP_AUTODIFF_H_
#define LSP_AUTODIFF_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lsp/random.h"
#include "lsp/tensor.h"

namespace lsp {

// A trainable tensor. `grad` is empty until the parameter takes part in a
// backward pass; after that it always has the shape of `value`.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  bool has_grad() const { return !grad.empty(); }
  void ZeroGrad() { grad = Tensor(value.shape(), 0.0); }
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; only valid while the tape has
// not been cleared.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  const Tensor& value() const;
  const Tensor& grad() const;
  bool requires_grad() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode computation tape. Nodes are appended in evaluation order, so
// reverse insertion order is a valid topological order for backprop. A tape
// belongs to a single thread and is cleared between optimizer steps.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that never receives gradient.
  Var Constant(Tensor value);
  // Leaf that receives gradient; useful for tests and oracles.
  Var Variable(Tensor value);
  // Leaf bound to `param`; Backward() accumulates into param.grad.
  Var Param(Parameter& param);

  // Appends an op node. `parents` decide whether the node requires grad.
  Var Record(Tensor value, std::span<const Var> parents, BackwardFn backward);

  // Populates gradients of every node reachable from `loss`, which must be a
  // single-element tensor. Parameters bound to the tape but unreachable from
  // the loss end up with a zero (present) grad.
  void Backward(Var loss);

  void Clear();
  std::size_t size() const { return nodes_.size(); }

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Adds `g` into the gradient slot of node `id` (no-op if it does not
  // require grad). Used by backward functions.
  void AccumulateGrad(std::size_t id, const Tensor& g);

  // Piecewise-linear ops register the pre-activation sign pattern here, so
  // finite-difference checks can detect coordinates that straddle a kink.
  void RecordKinkSigns(std::span<const double> inputs);
  const std::vector<bool>& kink_signs() const { return kink_signs_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
  };

  std::vector<Node> nodes_;
  std::vector<bool> kink_signs_;
};

// ---- Differentiable ops. Inputs must live on the same tape. ----

Var MatMul(Var a, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double factor);
// a[m x n] + bias[1 x n] broadcast over rows.
Var AddBias(Var a, Var bias);
Var Square(Var a);
Var Sum(Var a);
Var Mean(Var a);
Var Relu(Var a);
Var LeakyRelu(Var a, double slope = 0.01);
Var Sigmoid(Var a);
Var Tanh(Var a);
Var SliceCols(Var a, std::size_t begin, std::size_t end);
// Per-column z-score over the rows of the batch:
// (a - mean) / sqrt(var + eps), population variance.
Var StandardizeCols(Var a, double eps);
Var ConcatCols(Var a, Var b);

// Identity forward; backward multiplies the incoming gradient by -lambda.
Var GradReverse(Var a, double lambda);

// Inverted-dropout mask: each entry is 1/(1-rate) with probability 1-rate,
// else 0. One uniform draw per entry in row-major order.
Tensor DropoutMask(const Shape& shape, double rate, Rng& rng);

// Inverted dropout with keep-probability (1 - rate). Identity when
// `training` is false or rate == 0.
Var Dropout(Var a, double rate, bool training, Rng* rng);

// Mean over all elements of (pred - target)^2.
Var MseLoss(Var pred, Var target);

// Mean over rows of -log softmax(logits)[row, label].
Var SoftmaxCrossEntropy(Var logits, std::span<const int> labels);

}  // namespace lsp

#endif  // LSP_AUTODIFF_H_
