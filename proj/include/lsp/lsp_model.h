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

#ifndef LSP_LSP_MODEL_H_
#define LSP_LSP_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lsp/autodiff.h"
#include "lsp/random.h"
#include "lsp/tensor.h"

namespace lsp {

enum class Activation { kIdentity, kRelu, kLeakyRelu, kTanh };

inline constexpr double kLeakySlope = 0.01;

// y = x * weight + bias, weight is [in x out], bias is [1 x out].
struct DenseLayer {
  Parameter weight;
  Parameter bias;
};

// Fully connected stack. `hidden` is applied after every layer but the last
// and `output` after the last; dropout (if any) follows each hidden
// activation.
class Mlp {
 public:
  Mlp() = default;
  // widths = {input, hidden..., output}. Glorot-uniform weights drawn from
  // `rng` layer by layer, zero biases; all values float32-representable.
  Mlp(const std::string& name, const std::vector<std::size_t>& widths,
      Activation hidden, double dropout_rate, Rng& rng,
      Activation output = Activation::kIdentity);

  Tensor Forward(const Tensor& x, bool training = false,
                 Rng* rng = nullptr) const;
  Var Forward(Tape& tape, Var x, bool training = false, Rng* rng = nullptr);

  bool empty() const { return layers_.empty(); }
  std::size_t input_width() const;
  std::size_t output_width() const;
  double dropout_rate() const { return dropout_rate_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  void AppendParameters(std::vector<Parameter*>& out);
  void AppendParameters(std::vector<const Parameter*>& out) const;

 private:
  std::vector<DenseLayer> layers_;
  Activation hidden_ = Activation::kIdentity;
  Activation output_ = Activation::kIdentity;
  double dropout_rate_ = 0.0;
};

double GlorotLimit(std::size_t fan_in, std::size_t fan_out);

struct ModelDims {
  std::size_t input_dim = 0;
  std::size_t z_s_dim = 2;
  std::size_t z_ns_dim = 8;
  std::size_t n_sensitive_classes = 2;
  std::vector<std::size_t> encoder_hidden = {64, 32};
  std::vector<std::size_t> decoder_hidden = {32, 64};
  std::vector<std::size_t> discriminator_hidden = {128, 64};

  std::size_t latent_dim() const { return z_s_dim + z_ns_dim; }
  // Throws a config error for zero widths or fewer than two classes.
  void Validate() const;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Batch of latent codes; row i of z_s and z_ns together form the encoder
// output for input row i, in the order [z_s | z_ns].
struct LatentCode {
  Tensor z_s;
  Tensor z_ns;
};

// Encoder/decoder pair with a privacy discriminator on the released slice
// z_ns and a cooperative sensitive head on the keyed slice z_s.
class LspModel {
 public:
  static constexpr double kDiscriminatorDropout = 0.3;
  // The discriminator z-scores z_ns over the batch before its first layer.
  static constexpr double kDiscriminatorInputEps = 1e-8;

  LspModel() = default;
  static LspModel Init(const ModelDims& dims, std::uint64_t seed);

  const ModelDims& dims() const { return dims_; }

  LatentCode Encode(const Tensor& x) const;
  Tensor Decode(const LatentCode& code) const;
  // Decodes with z_s replaced by zeros: the reconstruction available to a
  // holder of z_ns alone.
  Tensor DecodeObfuscated(const Tensor& z_ns) const;
  // Class probabilities from z_ns. Dropout only when `training` is set.
  Tensor Discriminate(const Tensor& z_ns, bool training = false,
                      Rng* rng = nullptr) const;
  // Class probabilities from z_s. Requires z_s_dim > 0.
  Tensor SensitiveHead(const Tensor& z_s) const;

  Mlp& encoder() { return encoder_; }
  Mlp& decoder() { return decoder_; }
  Mlp& discriminator() { return discriminator_; }
  Mlp& sens_head() { return sens_head_; }
  const Mlp& encoder() const { return encoder_; }
  const Mlp& decoder() const { return decoder_; }
  const Mlp& discriminator() const { return discriminator_; }
  const Mlp& sens_head() const { return sens_head_; }

  // Encoder, decoder, discriminator, sens_head; each layer weight then bias.
  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;

 private:
  void CheckInputWidth(const Tensor& x) const;

  ModelDims dims_;
  Mlp encoder_;
  Mlp decoder_;
  Mlp discriminator_;
  Mlp sens_head_;
};

}  // namespace lsp

#endif  // LSP_LSP_MODEL_H_
