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

#ifndef LSP_TESTS_OP_CATALOG_H_
#define LSP_TESTS_OP_CATALOG_H_

// Random instances of every differentiable tape op, each reduced to a scalar
// through a random linear functional so upstream gradients are non-trivial.
// GradReverse is absent: its backward is intentionally not the derivative of
// its forward, and it has a dedicated property test instead.

#include <functional>
#include <string>
#include <vector>

#include "lsp/autodiff.h"
#include "lsp/finite_diff.h"
#include "lsp/random.h"

namespace lsp::testing {

struct OpInstance {
  ScalarFn f;
  Tensor x;
};

struct OpCase {
  std::string name;
  std::function<OpInstance(Rng&)> make;
};

inline Tensor RandomTensor(Shape shape, Rng& rng, double lo = -1.0,
                           double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.mutable_values()) v = lo + (hi - lo) * UniformUnit(rng);
  return t;
}

// sum(y * c) for a fixed random c of y's shape.
inline Var Project(Var y, const Tensor& c) {
  return Sum(Mul(y, y.tape().Constant(c)));
}

inline std::vector<OpCase> AllOpCases() {
  std::vector<OpCase> cases;
  auto unary = [&cases](std::string name, std::function<Var(Var)> op,
                        double lo = -1.0, double hi = 1.0) {
    cases.push_back({name, [op, lo, hi](Rng& rng) {
                       Tensor x = RandomTensor({3, 4}, rng, lo, hi);
                       Tensor c = RandomTensor({3, 4}, rng);
                       return OpInstance{
                           [op, c](Var v) { return Project(op(v), c); }, x};
                     }});
  };
  unary("square", [](Var v) { return Square(v); });
  unary("scale", [](Var v) { return Scale(v, -2.5); });
  unary("relu", [](Var v) { return Relu(v); });
  unary("leaky_relu", [](Var v) { return LeakyRelu(v, 0.01); });
  unary("sigmoid", [](Var v) { return Sigmoid(v); }, -4.0, 4.0);
  unary("tanh", [](Var v) { return Tanh(v); }, -2.0, 2.0);

  cases.push_back({"sum", [](Rng& rng) {
                     return OpInstance{[](Var v) { return Sum(v); },
                                       RandomTensor({2, 5}, rng)};
                   }});
  cases.push_back({"mean", [](Rng& rng) {
                     return OpInstance{
                         [](Var v) { return Scale(Mean(Square(v)), 3.0); },
                         RandomTensor({4, 3}, rng)};
                   }});
  cases.push_back({"matmul_left", [](Rng& rng) {
                     Tensor b = RandomTensor({4, 2}, rng);
                     Tensor c = RandomTensor({3, 2}, rng);
                     return OpInstance{
                         [b, c](Var a) {
                           return Project(MatMul(a, a.tape().Constant(b)), c);
                         },
                         RandomTensor({3, 4}, rng)};
                   }});
  cases.push_back({"matmul_right", [](Rng& rng) {
                     Tensor a = RandomTensor({3, 4}, rng);
                     Tensor c = RandomTensor({3, 2}, rng);
                     return OpInstance{
                         [a, c](Var b) {
                           return Project(MatMul(b.tape().Constant(a), b), c);
                         },
                         RandomTensor({4, 2}, rng)};
                   }});
  auto binary = [&cases](std::string name, std::function<Var(Var, Var)> op,
                         bool left) {
    cases.push_back({name, [op, left](Rng& rng) {
                       Tensor other = RandomTensor({3, 4}, rng);
                       Tensor c = RandomTensor({3, 4}, rng);
                       return OpInstance{
                           [op, other, c, left](Var v) {
                             Var o = v.tape().Constant(other);
                             Var y = left ? op(v, o) : op(o, v);
                             // Losses are already scalar.
                             return y.value().size() == 1 ? Scale(y, 1.7)
                                                          : Project(y, c);
                           },
                           RandomTensor({3, 4}, rng)};
                     }});
  };
  binary("add_left", [](Var a, Var b) { return Add(a, b); }, true);
  binary("add_right", [](Var a, Var b) { return Add(a, b); }, false);
  binary("sub_left", [](Var a, Var b) { return Sub(a, b); }, true);
  binary("sub_right", [](Var a, Var b) { return Sub(a, b); }, false);
  binary("mul_left", [](Var a, Var b) { return Mul(a, b); }, true);
  binary("mul_right", [](Var a, Var b) { return Mul(a, b); }, false);
  binary("mse_pred", [](Var a, Var b) { return MseLoss(a, b); }, true);
  binary("mse_target", [](Var a, Var b) { return MseLoss(a, b); }, false);
  cases.push_back({"add_bias_input", [](Rng& rng) {
                     Tensor bias = RandomTensor({1, 4}, rng);
                     Tensor c = RandomTensor({3, 4}, rng);
                     return OpInstance{
                         [bias, c](Var v) {
                           return Project(AddBias(v, v.tape().Constant(bias)),
                                          c);
                         },
                         RandomTensor({3, 4}, rng)};
                   }});
  cases.push_back({"add_bias_bias", [](Rng& rng) {
                     Tensor a = RandomTensor({3, 4}, rng);
                     Tensor c = RandomTensor({3, 4}, rng);
                     return OpInstance{
                         [a, c](Var b) {
                           return Project(AddBias(b.tape().Constant(a), b), c);
                         },
                         RandomTensor({1, 4}, rng)};
                   }});
  cases.push_back({"slice_cols", [](Rng& rng) {
                     Tensor c = RandomTensor({3, 2}, rng);
                     return OpInstance{
                         [c](Var v) { return Project(SliceCols(v, 1, 3), c); },
                         RandomTensor({3, 4}, rng)};
                   }});
  cases.push_back({"standardize_cols", [](Rng& rng) {
                     Tensor c = RandomTensor({5, 3}, rng);
                     return OpInstance{
                         [c](Var v) {
                           return Project(StandardizeCols(v, 1e-3), c);
                         },
                         RandomTensor({5, 3}, rng)};
                   }});
  cases.push_back({"concat_cols", [](Rng& rng) {
                     Tensor other = RandomTensor({3, 2}, rng);
                     Tensor c = RandomTensor({3, 6}, rng);
                     return OpInstance{
                         [other, c](Var v) {
                           return Project(
                               ConcatCols(v.tape().Constant(other), v), c);
                         },
                         RandomTensor({3, 4}, rng)};
                   }});
  cases.push_back({"dropout", [](Rng& rng) {
                     const std::uint64_t mask_seed = rng();
                     Tensor c = RandomTensor({3, 4}, rng);
                     return OpInstance{
                         [mask_seed, c](Var v) {
                           Rng mask_rng(mask_seed);
                           return Project(Dropout(v, 0.3, true, &mask_rng), c);
                         },
                         RandomTensor({3, 4}, rng)};
                   }});
  cases.push_back({"softmax_cross_entropy", [](Rng& rng) {
                     std::vector<int> labels;
                     for (int i = 0; i < 4; ++i) {
                       labels.push_back(static_cast<int>(rng() % 3));
                     }
                     return OpInstance{
                         [labels](Var v) {
                           return SoftmaxCrossEntropy(v, labels);
                         },
                         RandomTensor({4, 3}, rng, -3.0, 3.0)};
                   }});
  // A small two-layer network with every activation kind, w.r.t. the input.
  cases.push_back({"mlp_chain", [](Rng& rng) {
                     Tensor w1 = RandomTensor({4, 5}, rng);
                     Tensor b1 = RandomTensor({1, 5}, rng);
                     Tensor w2 = RandomTensor({5, 3}, rng);
                     std::vector<int> labels = {0, 2, 1};
                     return OpInstance{
                         [=](Var x) {
                           Tape& t = x.tape();
                           Var h = LeakyRelu(
                               AddBias(MatMul(x, t.Constant(w1)),
                                       t.Constant(b1)));
                           Var logits = MatMul(Tanh(h), t.Constant(w2));
                           return Add(SoftmaxCrossEntropy(logits, labels),
                                      Mean(Sigmoid(logits)));
                         },
                         RandomTensor({3, 4}, rng)};
                   }});
  return cases;
}

}  // namespace lsp::testing

#endif  // LSP_TESTS_OP_CATALOG_H_
