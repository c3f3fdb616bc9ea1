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

#ifndef LSP_MODEL_IO_H_
#define LSP_MODEL_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lsp/lsp_model.h"

namespace lsp {

// Model file layout (all integers little-endian uint32):
//
//   "LSPM"                      4-byte magic
//   format_version              currently 1
//   input_dim z_s_dim z_ns_dim n_sensitive_classes
//   n_enc, enc_hidden[n_enc]
//   n_dec, dec_hidden[n_dec]
//   n_disc, disc_hidden[n_disc]
//   n_params                    total float count that follows
//   params[n_params]            float32 LE; encoder, decoder, discriminator,
//                               sens_head; per layer weight (row-major
//                               [in x out]) then bias
//   crc32                       CRC-32 of every preceding byte
inline constexpr char kModelMagic[4] = {'L', 'S', 'P', 'M'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<unsigned char> SerializeModel(const LspModel& model);
LspModel DeserializeModel(const std::vector<unsigned char>& bytes);

void SaveModel(const LspModel& model, const std::filesystem::path& path);
LspModel LoadModel(const std::filesystem::path& path);

}  // namespace lsp

#endif  // LSP_MODEL_IO_H_
