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

#include "lsp/model_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <utility>

#include <zlib.h>

#include "lsp/error.h"

namespace lsp {
namespace {

void PutU32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t Crc32(const unsigned char* data, std::size_t n) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), data, static_cast<uInt>(n)));
}

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& bytes, std::size_t end)
      : bytes_(bytes), end_(end) {}

  std::uint32_t U32(const char* what) {
    if (pos_ + 4 > end_) {
      throw FormatError(std::string("model file truncated while reading ") +
                        what + " at offset " + std::to_string(pos_));
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  float F32() { return std::bit_cast<float>(U32("parameters")); }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

void PutWidths(std::vector<unsigned char>& out,
               const std::vector<std::size_t>& widths) {
  PutU32(out, static_cast<std::uint32_t>(widths.size()));
  for (std::size_t w : widths) PutU32(out, static_cast<std::uint32_t>(w));
}

std::vector<std::size_t> ReadWidths(Reader& r) {
  const std::uint32_t n = r.U32("layer count");
  if (n > 64) throw FormatError("implausible hidden layer count " + std::to_string(n));
  std::vector<std::size_t> widths;
  for (std::uint32_t i = 0; i < n; ++i) widths.push_back(r.U32("layer width"));
  return widths;
}

}  // namespace

std::vector<unsigned char> SerializeModel(const LspModel& model) {
  const ModelDims& d = model.dims();
  std::vector<unsigned char> out(std::begin(kModelMagic), std::end(kModelMagic));
  PutU32(out, kModelFormatVersion);
  PutU32(out, static_cast<std::uint32_t>(d.input_dim));
  PutU32(out, static_cast<std::uint32_t>(d.z_s_dim));
  PutU32(out, static_cast<std::uint32_t>(d.z_ns_dim));
  PutU32(out, static_cast<std::uint32_t>(d.n_sensitive_classes));
  PutWidths(out, d.encoder_hidden);
  PutWidths(out, d.decoder_hidden);
  PutWidths(out, d.discriminator_hidden);
  std::size_t count = 0;
  for (const Parameter* p : model.Parameters()) count += p->value.size();
  PutU32(out, static_cast<std::uint32_t>(count));
  for (const Parameter* p : model.Parameters()) {
    for (double v : p->value.values()) {
      PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  PutU32(out, Crc32(out.data(), out.size()));
  return out;
}

LspModel DeserializeModel(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 12) {
    throw FormatError("model file too short (" + std::to_string(bytes.size()) +
                      " bytes)");
  }
  if (std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
    throw FormatError("bad model magic at offset 0");
  }
  Reader header(bytes, bytes.size());
  header.U32("magic");
  const std::uint32_t version = header.U32("version");
  if (version == 0 || version > kModelFormatVersion) {
    throw FormatError("unsupported model format version " +
                      std::to_string(version));
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) {
    stored |= std::uint32_t{bytes[body + i]} << (8 * i);
  }

  Reader r(bytes, body);
  r.U32("magic");
  r.U32("version");
  ModelDims d;
  d.input_dim = r.U32("input_dim");
  d.z_s_dim = r.U32("z_s_dim");
  d.z_ns_dim = r.U32("z_ns_dim");
  d.n_sensitive_classes = r.U32("n_sensitive_classes");
  d.encoder_hidden = ReadWidths(r);
  d.decoder_hidden = ReadWidths(r);
  d.discriminator_hidden = ReadWidths(r);
  const std::uint32_t count = r.U32("parameter count");
  if (r.pos() + std::size_t{count} * 4 != body) {
    throw FormatError("model file length mismatch: header declares " +
                      std::to_string(count) + " parameters, file has room for " +
                      std::to_string((body - std::min(body, r.pos())) / 4));
  }
  if (Crc32(bytes.data(), body) != stored) {
    throw FormatError("model file checksum mismatch (file is corrupt)");
  }

  LspModel model = LspModel::Init(d, 0);
  std::size_t expected = 0;
  for (const Parameter* p : std::as_const(model).Parameters()) {
    expected += p->value.size();
  }
  if (expected != count) {
    throw FormatError("parameter count " + std::to_string(count) +
                      " does not match dims (" + std::to_string(expected) + ")");
  }
  for (Parameter* p : model.Parameters()) {
    for (double& v : p->value.mutable_values()) v = r.F32();
  }
  return model;
}

void SaveModel(const LspModel& model, const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model file '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

LspModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  const std::vector<unsigned char> bytes(std::istreambuf_iterator<char>(in), {});
  return DeserializeModel(bytes);
}

}  // namespace lsp
