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

#include "lsp/lsp_model.h"

#include <cmath>

#include "lsp/error.h"

namespace lsp {
namespace {

double ApplyActivation(Activation act, double x) {
  switch (act) {
    case Activation::kRelu:
      return x < 0.0 ? 0.0 : x;
    case Activation::kLeakyRelu:
      return x < 0.0 ? kLeakySlope * x : x;
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kIdentity:
      break;
  }
  return x;
}

Var ApplyActivation(Activation act, Var x) {
  switch (act) {
    case Activation::kRelu:
      return Relu(x);
    case Activation::kLeakyRelu:
      return LeakyRelu(x, kLeakySlope);
    case Activation::kTanh:
      return Tanh(x);
    case Activation::kIdentity:
      break;
  }
  return x;
}

}  // namespace

double GlorotLimit(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Mlp::Mlp(const std::string& name, const std::vector<std::size_t>& widths,
         Activation hidden, double dropout_rate, Rng& rng, Activation output)
    : hidden_(hidden), output_(output), dropout_rate_(dropout_rate) {
  if (widths.size() < 2) {
    throw ConfigError(name + ": needs at least an input and output width");
  }
  for (std::size_t w : widths) {
    if (w == 0) throw ConfigError(name + ": layer widths must be positive");
  }
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l], out = widths[l + 1];
    const double limit = GlorotLimit(in, out);
    DenseLayer layer;
    layer.weight.name = name + "." + std::to_string(l) + ".weight";
    layer.weight.value = Tensor({in, out});
    for (double& w : layer.weight.value.mutable_values()) {
      const double u = (2.0 * UniformUnit(rng) - 1.0) * limit;
      // Round toward zero so |w| never exceeds the limit after narrowing.
      float f = static_cast<float>(u);
      if (std::abs(static_cast<double>(f)) > limit) {
        f = std::nextafter(f, 0.0f);
      }
      w = f;
    }
    layer.bias.name = name + "." + std::to_string(l) + ".bias";
    layer.bias.value = Tensor({1, out}, 0.0);
    layers_.push_back(std::move(layer));
  }
}

std::size_t Mlp::input_width() const {
  return layers_.empty() ? 0 : layers_.front().weight.value.rows();
}

std::size_t Mlp::output_width() const {
  return layers_.empty() ? 0 : layers_.back().weight.value.cols();
}

Tensor Mlp::Forward(const Tensor& x, bool training, Rng* rng) const {
  if (x.rank() != 2 || x.cols() != input_width()) {
    throw ShapeError("mlp: input " + ShapeToString(x.shape()) +
                     " does not match width " + std::to_string(input_width()));
  }
  Tensor h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = AddRowVector(MatMul(h, layers_[l].weight.value),
                     layers_[l].bias.value);
    if (l + 1 == layers_.size()) {
      for (double& v : h.mutable_values()) v = ApplyActivation(output_, v);
      break;
    }
    for (double& v : h.mutable_values()) v = ApplyActivation(hidden_, v);
    if (training && dropout_rate_ > 0.0) {
      if (rng == nullptr) throw ContractError("training dropout needs an rng");
      const Tensor mask = DropoutMask(h.shape(), dropout_rate_, *rng);
      for (std::size_t i = 0; i < h.size(); ++i) h[i] *= mask[i];
    }
  }
  return h;
}

Var Mlp::Forward(Tape& tape, Var x, bool training, Rng* rng) {
  if (x.value().rank() != 2 || x.value().cols() != input_width()) {
    throw ShapeError("mlp: input " + ShapeToString(x.shape()) +
                     " does not match width " + std::to_string(input_width()));
  }
  Var h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = AddBias(MatMul(h, tape.Param(layers_[l].weight)),
                tape.Param(layers_[l].bias));
    if (l + 1 == layers_.size()) {
      h = ApplyActivation(output_, h);
      break;
    }
    h = ApplyActivation(hidden_, h);
    h = Dropout(h, dropout_rate_, training, rng);
  }
  return h;
}

void Mlp::AppendParameters(std::vector<Parameter*>& out) {
  for (DenseLayer& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
}

void Mlp::AppendParameters(std::vector<const Parameter*>& out) const {
  for (const DenseLayer& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
}

void ModelDims::Validate() const {
  if (input_dim == 0) throw ConfigError("input_dim must be positive");
  if (z_ns_dim == 0) throw ConfigError("z_ns_dim must be positive");
  if (n_sensitive_classes < 2) {
    throw ConfigError("n_sensitive_classes must be >= 2");
  }
  for (const auto* widths :
       {&encoder_hidden, &decoder_hidden, &discriminator_hidden}) {
    for (std::size_t w : *widths) {
      if (w == 0) throw ConfigError("hidden widths must be positive");
    }
  }
}

LspModel LspModel::Init(const ModelDims& dims, std::uint64_t seed) {
  dims.Validate();
  Rng rng = MakeRng(seed, SeedComponent::kModelInit);
  LspModel model;
  model.dims_ = dims;

  std::vector<std::size_t> widths = {dims.input_dim};
  widths.insert(widths.end(), dims.encoder_hidden.begin(),
                dims.encoder_hidden.end());
  widths.push_back(dims.latent_dim());
  model.encoder_ = Mlp("encoder", widths, Activation::kLeakyRelu, 0.0, rng);

  widths = {dims.latent_dim()};
  widths.insert(widths.end(), dims.decoder_hidden.begin(),
                dims.decoder_hidden.end());
  widths.push_back(dims.input_dim);
  model.decoder_ = Mlp("decoder", widths, Activation::kRelu, 0.0, rng);

  widths = {dims.z_ns_dim};
  widths.insert(widths.end(), dims.discriminator_hidden.begin(),
                dims.discriminator_hidden.end());
  widths.push_back(dims.n_sensitive_classes);
  model.discriminator_ = Mlp("discriminator", widths, Activation::kLeakyRelu,
                             kDiscriminatorDropout, rng);

  if (dims.z_s_dim > 0) {
    model.sens_head_ =
        Mlp("sens_head", {dims.z_s_dim, dims.n_sensitive_classes},
            Activation::kIdentity, 0.0, rng);
  }
  return model;
}

void LspModel::CheckInputWidth(const Tensor& x) const {
  if (x.rank() != 2 || x.cols() != dims_.input_dim) {
    throw ShapeError("encode: input " + ShapeToString(x.shape()) +
                     " but model input_dim is " +
                     std::to_string(dims_.input_dim));
  }
}

LatentCode LspModel::Encode(const Tensor& x) const {
  CheckInputWidth(x);
  const Tensor z = encoder_.Forward(x);
  return {SliceCols(z, 0, dims_.z_s_dim),
          SliceCols(z, dims_.z_s_dim, dims_.latent_dim())};
}

Tensor LspModel::Decode(const LatentCode& code) const {
  if (code.z_s.rank() != 2 || code.z_ns.rank() != 2 ||
      code.z_s.cols() != dims_.z_s_dim || code.z_ns.cols() != dims_.z_ns_dim) {
    throw ShapeError("decode: latent slices " + ShapeToString(code.z_s.shape()) +
                     " + " + ShapeToString(code.z_ns.shape()) +
                     " do not match z_s_dim=" + std::to_string(dims_.z_s_dim) +
                     ", z_ns_dim=" + std::to_string(dims_.z_ns_dim));
  }
  return decoder_.Forward(ConcatCols(code.z_s, code.z_ns));
}

Tensor LspModel::DecodeObfuscated(const Tensor& z_ns) const {
  if (z_ns.rank() != 2) {
    throw ShapeError("decode_obfuscated: z_ns must be a matrix");
  }
  return Decode({Tensor({z_ns.rows(), dims_.z_s_dim}, 0.0), z_ns});
}

Tensor LspModel::Discriminate(const Tensor& z_ns, bool training,
                              Rng* rng) const {
  return Softmax(discriminator_.Forward(
      StandardizeCols(z_ns, kDiscriminatorInputEps), training, rng));
}

Tensor LspModel::SensitiveHead(const Tensor& z_s) const {
  if (sens_head_.empty()) {
    throw ContractError("sens_head is absent when z_s_dim == 0");
  }
  return Softmax(sens_head_.Forward(z_s));
}

std::vector<Parameter*> LspModel::Parameters() {
  std::vector<Parameter*> out;
  encoder_.AppendParameters(out);
  decoder_.AppendParameters(out);
  discriminator_.AppendParameters(out);
  sens_head_.AppendParameters(out);
  return out;
}

std::vector<const Parameter*> LspModel::Parameters() const {
  std::vector<const Parameter*> out;
  encoder_.AppendParameters(out);
  decoder_.AppendParameters(out);
  discriminator_.AppendParameters(out);
  sens_head_.AppendParameters(out);
  return out;
}

}  // namespace lsp
