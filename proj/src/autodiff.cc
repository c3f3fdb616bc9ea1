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

#include "lsp/autodiff.h"

#include <cmath>
#include <utility>

#include "lsp/error.h"

namespace lsp {

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::Constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), false, nullptr, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::Variable(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), true, nullptr, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::Param(Parameter& param) {
  nodes_.push_back(Node{param.value, Tensor(), true, nullptr, &param});
  return Var(this, nodes_.size() - 1);
}

Var Tape::Record(Tensor value, std::span<const Var> parents,
                 BackwardFn backward) {
  bool needs = false;
  for (const Var& p : parents) {
    if (&p.tape() != this) {
      throw ContractError("op mixes variables from different tapes");
    }
    needs = needs || nodes_[p.id()].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), Tensor(), needs,
                        needs ? std::move(backward) : nullptr, nullptr});
  return Var(this, nodes_.size() - 1);
}

void Tape::AccumulateGrad(std::size_t id, const Tensor& g) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (node.grad.empty()) {
    node.grad = g;
    return;
  }
  auto dst = node.grad.mutable_values();
  const auto src = g.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void Tape::Backward(Var loss) {
  if (&loss.tape() != this) throw ContractError("loss is on another tape");
  if (loss.value().size() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " +
                        ShapeToString(loss.value().shape()));
  }
  for (Node& node : nodes_) node.grad = Tensor();
  if (nodes_[loss.id()].requires_grad) {
    nodes_[loss.id()].grad = Tensor(loss.value().shape(), 1.0);
  }
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.requires_grad || node.grad.empty()) continue;
    if (node.backward) node.backward(*this, id);
  }
  for (Node& node : nodes_) {
    if (node.param == nullptr) continue;
    Parameter& p = *node.param;
    if (!p.has_grad()) p.ZeroGrad();
    if (node.grad.empty()) continue;
    auto dst = p.grad.mutable_values();
    const auto src = node.grad.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

void Tape::Clear() {
  nodes_.clear();
  kink_signs_.clear();
}

void Tape::RecordKinkSigns(std::span<const double> inputs) {
  for (double v : inputs) kink_signs_.push_back(v > 0.0);
}

namespace {

void RequireSameShape(const Var& a, const Var& b, const char* op) {
  if (!a.value().SameShape(b.value())) {
    throw ShapeError(std::string(op) + ": shapes differ: " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
}

// Elementwise op whose local derivative depends only on (input, output).
template <typename Fwd, typename Deriv>
Var Elementwise(Var a, Fwd fwd, Deriv deriv) {
  Tensor out = a.value();
  for (double& v : out.mutable_values()) v = fwd(v);
  const std::size_t aid = a.id();
  return a.tape().Record(std::move(out), {&a, 1},
                         [aid, deriv](Tape& t, std::size_t self) {
                           const Tensor& x = t.value(aid);
                           const Tensor& y = t.value(self);
                           Tensor g = t.grad(self);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             g[i] *= deriv(x[i], y[i]);
                           }
                           t.AccumulateGrad(aid, g);
                         });
}

}  // namespace

Var MatMul(Var a, Var b) {
  Tensor out = MatMul(a.value(), b.value());
  const std::size_t aid = a.id(), bid = b.id();
  const Var parents[] = {a, b};
  return a.tape().Record(std::move(out), parents,
                         [aid, bid](Tape& t, std::size_t self) {
                           const Tensor& g = t.grad(self);
                           if (t.requires_grad(aid)) {
                             t.AccumulateGrad(
                                 aid, MatMul(g, Transpose(t.value(bid))));
                           }
                           if (t.requires_grad(bid)) {
                             t.AccumulateGrad(
                                 bid, MatMul(Transpose(t.value(aid)), g));
                           }
                         });
}

Var Add(Var a, Var b) {
  RequireSameShape(a, b, "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  const std::size_t aid = a.id(), bid = b.id();
  const Var parents[] = {a, b};
  return a.tape().Record(std::move(out), parents,
                         [aid, bid](Tape& t, std::size_t self) {
                           t.AccumulateGrad(aid, t.grad(self));
                           t.AccumulateGrad(bid, t.grad(self));
                         });
}

Var Sub(Var a, Var b) {
  RequireSameShape(a, b, "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  const std::size_t aid = a.id(), bid = b.id();
  const Var parents[] = {a, b};
  return a.tape().Record(std::move(out), parents,
                         [aid, bid](Tape& t, std::size_t self) {
                           t.AccumulateGrad(aid, t.grad(self));
                           Tensor neg = t.grad(self);
                           for (double& v : neg.mutable_values()) v = -v;
                           t.AccumulateGrad(bid, neg);
                         });
}

Var Mul(Var a, Var b) {
  RequireSameShape(a, b, "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  const std::size_t aid = a.id(), bid = b.id();
  const Var parents[] = {a, b};
  return a.tape().Record(
      std::move(out), parents, [aid, bid](Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        if (t.requires_grad(aid)) {
          Tensor ga = g;
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= t.value(bid)[i];
          t.AccumulateGrad(aid, ga);
        }
        if (t.requires_grad(bid)) {
          Tensor gb = g;
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] *= t.value(aid)[i];
          t.AccumulateGrad(bid, gb);
        }
      });
}

Var Scale(Var a, double factor) {
  return Elementwise(
      a, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Var AddBias(Var a, Var bias) {
  Tensor out = AddRowVector(a.value(), bias.value());
  const std::size_t aid = a.id(), bid = bias.id();
  const Var parents[] = {a, bias};
  return a.tape().Record(
      std::move(out), parents, [aid, bid](Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        t.AccumulateGrad(aid, g);
        if (t.requires_grad(bid)) {
          Tensor gb(t.value(bid).shape(), 0.0);
          for (std::size_t i = 0; i < g.rows(); ++i) {
            for (std::size_t j = 0; j < g.cols(); ++j) gb[j] += g(i, j);
          }
          t.AccumulateGrad(bid, gb);
        }
      });
}

Var Square(Var a) {
  return Elementwise(
      a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Var Sum(Var a) {
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  const std::size_t aid = a.id();
  return a.tape().Record(Tensor::Scalar(total), {&a, 1},
                         [aid](Tape& t, std::size_t self) {
                           t.AccumulateGrad(aid, Tensor(t.value(aid).shape(),
                                                        t.grad(self).item()));
                         });
}

Var Mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ContractError("mean of an empty tensor");
  return Scale(Sum(a), 1.0 / n);
}

Var Relu(Var a) {
  a.tape().RecordKinkSigns(a.value().values());
  // relu'(0) is taken as 0.
  return Elementwise(
      a, [](double x) { return x < 0.0 ? 0.0 : x; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var LeakyRelu(Var a, double slope) {
  a.tape().RecordKinkSigns(a.value().values());
  return Elementwise(
      a, [slope](double x) { return x < 0.0 ? slope * x : x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var Sigmoid(Var a) {
  return Elementwise(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var Tanh(Var a) {
  return Elementwise(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var SliceCols(Var a, std::size_t begin, std::size_t end) {
  Tensor out = SliceCols(a.value(), begin, end);
  const std::size_t aid = a.id();
  return a.tape().Record(
      std::move(out), {&a, 1}, [aid, begin](Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        Tensor ga(t.value(aid).shape(), 0.0);
        for (std::size_t i = 0; i < g.rows(); ++i) {
          for (std::size_t j = 0; j < g.cols(); ++j) ga(i, begin + j) = g(i, j);
        }
        t.AccumulateGrad(aid, ga);
      });
}

Var ConcatCols(Var a, Var b) {
  Tensor out = ConcatCols(a.value(), b.value());
  const std::size_t aid = a.id(), bid = b.id();
  const std::size_t split = a.value().cols();
  const Var parents[] = {a, b};
  return a.tape().Record(std::move(out), parents,
                         [aid, bid, split](Tape& t, std::size_t self) {
                           const Tensor& g = t.grad(self);
                           if (t.requires_grad(aid)) {
                             t.AccumulateGrad(aid, SliceCols(g, 0, split));
                           }
                           if (t.requires_grad(bid)) {
                             t.AccumulateGrad(bid,
                                              SliceCols(g, split, g.cols()));
                           }
                         });
}

Var GradReverse(Var a, double lambda) {
  if (!(lambda >= 0.0)) {
    throw ConfigError("grad_reverse: lambda must be >= 0, got " +
                      std::to_string(lambda));
  }
  const std::size_t aid = a.id();
  return a.tape().Record(a.value(), {&a, 1},
                         [aid, lambda](Tape& t, std::size_t self) {
                           Tensor g = t.grad(self);
                           for (double& v : g.mutable_values()) v *= -lambda;
                           t.AccumulateGrad(aid, g);
                         });
}

Tensor DropoutMask(const Shape& shape, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1), got " +
                      std::to_string(rate));
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask(shape, 0.0);
  for (double& m : mask.mutable_values()) {
    m = UniformUnit(rng) >= rate ? keep_scale : 0.0;
  }
  return mask;
}

Var Dropout(Var a, double rate, bool training, Rng* rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1), got " +
                      std::to_string(rate));
  }
  if (!training || rate == 0.0) return a;
  if (rng == nullptr) throw ContractError("training dropout needs an rng");
  return Mul(a, a.tape().Constant(DropoutMask(a.value().shape(), rate, *rng)));
}

Var MseLoss(Var pred, Var target) {
  RequireSameShape(pred, target, "mse_loss");
  return Mean(Square(Sub(pred, target)));
}

Var StandardizeCols(Var a, double eps) {
  if (!(eps > 0.0)) throw ConfigError("standardize_cols: eps must be > 0");
  const Tensor& x = a.value();
  Tensor y = StandardizeCols(x, eps);
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> inv_std(d);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      var += (x(i, j) - mean) * (x(i, j) - mean);
    }
    inv_std[j] = 1.0 / std::sqrt(var / static_cast<double>(n) + eps);
  }
  const std::size_t aid = a.id();
  Tensor y_copy = y;
  return a.tape().Record(
      std::move(y), {&a, 1},
      [aid, y = std::move(y_copy), inv_std = std::move(inv_std)](
          Tape& t, std::size_t self) {
        const Tensor& gy = t.grad(self);
        const std::size_t n = y.rows(), d = y.cols();
        const double dn = static_cast<double>(n);
        Tensor gx(y.shape(), 0.0);
        for (std::size_t j = 0; j < d; ++j) {
          double mean_g = 0.0, mean_gy = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            mean_g += gy(i, j);
            mean_gy += gy(i, j) * y(i, j);
          }
          mean_g /= dn;
          mean_gy /= dn;
          for (std::size_t i = 0; i < n; ++i) {
            gx(i, j) = inv_std[j] * (gy(i, j) - mean_g - y(i, j) * mean_gy);
          }
        }
        t.AccumulateGrad(aid, gx);
      });
}

Var SoftmaxCrossEntropy(Var logits, std::span<const int> labels) {
  const Tensor& z = logits.value();
  if (z.rank() != 2 || z.rows() != labels.size()) {
    throw ShapeError("cross_entropy: logits " + ShapeToString(z.shape()) +
                     " vs " + std::to_string(labels.size()) + " labels");
  }
  if (z.rows() == 0) throw ContractError("cross_entropy on an empty batch");
  const int n_classes = static_cast<int>(z.cols());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw DataError("label " + std::to_string(labels[i]) + " at row " +
                      std::to_string(i) + " outside [0, " +
                      std::to_string(n_classes) + ")");
    }
  }
  Tensor probs = Softmax(z);
  double total = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    // log-sum-exp form for the per-row loss.
    double mx = z(i, 0);
    for (std::size_t j = 1; j < z.cols(); ++j) mx = std::max(mx, z(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < z.cols(); ++j) s += std::exp(z(i, j) - mx);
    total += mx + std::log(s) - z(i, static_cast<std::size_t>(labels[i]));
  }
  const double n = static_cast<double>(z.rows());
  std::vector<int> ys(labels.begin(), labels.end());
  const std::size_t lid = logits.id();
  return logits.tape().Record(
      Tensor::Scalar(total / n), {&logits, 1},
      [lid, probs = std::move(probs), ys = std::move(ys), n](
          Tape& t, std::size_t self) {
        const double g = t.grad(self).item() / n;
        Tensor gl = probs;
        for (std::size_t i = 0; i < gl.rows(); ++i) {
          gl(i, static_cast<std::size_t>(ys[i])) -= 1.0;
        }
        for (double& v : gl.mutable_values()) v *= g;
        t.AccumulateGrad(lid, gl);
      });
}

}  // namespace lsp
