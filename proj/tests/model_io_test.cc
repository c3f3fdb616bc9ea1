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
#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "gtest/gtest.h"
#include "lsp/error.h"
#include "lsp/random.h"

namespace lsp {
namespace {

// Bitwise reflected CRC-32 with polynomial 0xEDB88320.
std::uint32_t ReferenceCrc32(const unsigned char* data, std::size_t n) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) {
    crc ^= data[i];
    for (int b = 0; b < 8; ++b) {
      crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
    }
  }
  return ~crc;
}

std::uint32_t ReadLe32(const std::vector<unsigned char>& b, std::size_t at) {
  return std::uint32_t{b[at]} | std::uint32_t{b[at + 1]} << 8 |
         std::uint32_t{b[at + 2]} << 16 | std::uint32_t{b[at + 3]} << 24;
}

void WriteLe32(std::vector<unsigned char>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<unsigned char>(v >> (8 * i));
}

void Reseal(std::vector<unsigned char>& b) {
  WriteLe32(b, b.size() - 4, ReferenceCrc32(b.data(), b.size() - 4));
}

LspModel TestModel() {
  ModelDims d;
  d.input_dim = 5;
  d.z_s_dim = 2;
  d.z_ns_dim = 3;
  d.encoder_hidden = {6};
  d.decoder_hidden = {4, 7};
  d.discriminator_hidden = {3};
  return LspModel::Init(d, 12);
}

std::size_t ParameterCount(const LspModel& m) {
  std::size_t n = 0;
  for (const Parameter* p : m.Parameters()) n += p->value.size();
  return n;
}

ErrorKind KindOf(const std::vector<unsigned char>& bytes, std::string* what) {
  try {
    DeserializeModel(bytes);
  } catch (const Error& e) {
    *what = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::kContract;
}

TEST(SerializeModelTest, LayoutMatchesDocumentedFormat) {
  const LspModel m = TestModel();
  const std::vector<unsigned char> b = SerializeModel(m);
  ASSERT_GE(b.size(), 8u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "LSPM");
  EXPECT_EQ(ReadLe32(b, 4), 1u);
  EXPECT_EQ(ReadLe32(b, 8), 5u);
  EXPECT_EQ(ReadLe32(b, 12), 2u);
  EXPECT_EQ(ReadLe32(b, 16), 3u);
  EXPECT_EQ(ReadLe32(b, 20), 2u);
  // Encoder {6}, decoder {4, 7}, discriminator {3}.
  const std::vector<std::uint32_t> widths = {1, 6, 2, 4, 7, 1, 3};
  for (std::size_t i = 0; i < widths.size(); ++i) {
    EXPECT_EQ(ReadLe32(b, 24 + 4 * i), widths[i]);
  }
  const std::size_t count_at = 24 + 4 * widths.size();
  const std::size_t n = ParameterCount(m);
  EXPECT_EQ(ReadLe32(b, count_at), n);
  EXPECT_EQ(b.size(), count_at + 4 + 4 * n + 4);
  EXPECT_EQ(ReadLe32(b, b.size() - 4), ReferenceCrc32(b.data(), b.size() - 4));
  // First parameter: encoder layer 0 weight element (0, 0) as float32 LE.
  const float w00 = static_cast<float>(m.encoder().layers()[0].weight.value(0, 0));
  EXPECT_EQ(ReadLe32(b, count_at + 4), std::bit_cast<std::uint32_t>(w00));
}

TEST(DeserializeModelTest, RoundTripIsBitIdentical) {
  const LspModel m = TestModel();
  const LspModel back = DeserializeModel(SerializeModel(m));
  EXPECT_EQ(back.dims(), m.dims());
  const auto pa = m.Parameters();
  const auto pb = back.Parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i]->value, pb[i]->value) << pa[i]->name;
  }
  Rng rng(1);
  Tensor x({8, 5});
  for (double& v : x.mutable_values()) v = UniformUnit(rng);
  EXPECT_EQ(back.Encode(x).z_ns, m.Encode(x).z_ns);
  EXPECT_EQ(back.Encode(x).z_s, m.Encode(x).z_s);
  EXPECT_EQ(SerializeModel(back), SerializeModel(m));
}

TEST(DeserializeModelTest, AnySingleFlippedParameterByteIsChecksumError) {
  const std::vector<unsigned char> good = SerializeModel(TestModel());
  const std::size_t n = ParameterCount(TestModel());
  const std::size_t params_end = good.size() - 4;
  const std::size_t params_begin = params_end - 4 * n;
  for (std::size_t at = params_begin; at < params_end; at += 7) {
    std::vector<unsigned char> bad = good;
    bad[at] ^= 0x01;
    std::string what;
    EXPECT_EQ(KindOf(bad, &what), ErrorKind::kFormat) << "offset " << at;
    EXPECT_NE(what.find("checksum"), std::string::npos) << what;
  }
}

TEST(DeserializeModelTest, FlippedChecksumByteIsChecksumError) {
  std::vector<unsigned char> bad = SerializeModel(TestModel());
  bad.back() ^= 0x80;
  std::string what;
  EXPECT_EQ(KindOf(bad, &what), ErrorKind::kFormat);
  EXPECT_NE(what.find("checksum"), std::string::npos) << what;
}

TEST(DeserializeModelTest, EveryTruncationIsRejected) {
  const std::vector<unsigned char> good = SerializeModel(TestModel());
  for (std::size_t len = 0; len < good.size(); ++len) {
    const std::vector<unsigned char> cut(good.begin(), good.begin() + len);
    std::string what;
    EXPECT_EQ(KindOf(cut, &what), ErrorKind::kFormat) << "length " << len;
  }
}

TEST(DeserializeModelTest, TruncatedParameterBlockReportsLength) {
  std::vector<unsigned char> cut = SerializeModel(TestModel());
  cut.resize(cut.size() - 12);
  std::string what;
  EXPECT_EQ(KindOf(cut, &what), ErrorKind::kFormat);
  EXPECT_NE(what.find("length"), std::string::npos) << what;
}

TEST(DeserializeModelTest, NewerVersionIsUnsupportedEvenWithValidChecksum) {
  std::vector<unsigned char> b = SerializeModel(TestModel());
  WriteLe32(b, 4, 2);
  Reseal(b);
  std::string what;
  EXPECT_EQ(KindOf(b, &what), ErrorKind::kFormat);
  EXPECT_NE(what.find("version"), std::string::npos) << what;
}

TEST(DeserializeModelTest, BadMagicNamesOffset) {
  std::vector<unsigned char> b = SerializeModel(TestModel());
  std::swap(b[0], b[3]);
  std::string what;
  EXPECT_EQ(KindOf(b, &what), ErrorKind::kFormat);
  EXPECT_NE(what.find("offset 0"), std::string::npos) << what;
}

TEST(DeserializeModelTest, InconsistentDimsWithValidChecksumAreRejected) {
  std::vector<unsigned char> b = SerializeModel(TestModel());
  WriteLe32(b, 8, 6);  // input_dim 5 -> 6 changes the expected count.
  Reseal(b);
  std::string what;
  EXPECT_EQ(KindOf(b, &what), ErrorKind::kFormat);
}

TEST(SaveLoadModelTest, FileRoundTrip) {
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() /
      ("lsp_model_io_" + std::to_string(::getpid()) + ".lspm");
  const LspModel m = TestModel();
  SaveModel(m, path);
  const LspModel back = LoadModel(path);
  std::filesystem::remove(path);
  EXPECT_EQ(SerializeModel(back), SerializeModel(m));
}

TEST(SaveLoadModelTest, MissingFileIsError) {
  EXPECT_THROW(LoadModel("/nonexistent/dir/model.lspm"), Error);
}

}  // namespace
}  // namespace lsp
