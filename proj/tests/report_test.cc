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

#include "lsp/report.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>
#include <unistd.h>
#include <vector>

#include "gtest/gtest.h"
#include "lsp/error.h"
#include "lsp/random.h"

namespace lsp {
namespace {

MetricsReport SampleReport(const std::string& name, const std::string& method) {
  MetricsReport r;
  r.experiment = name;
  r.method = method;
  r.seed = 7;
  r.config_fingerprint = 0x0123456789abcdefULL;
  r.dataset_fingerprint = 0xfedcba9876543210ULL;
  r.n_train = 800;
  r.n_test = 200;
  r.privacy_protection = 0.1 + 1e-17;
  r.attacker_accuracy_raw = 1.0;
  r.attacker_accuracy_obf = 0.55;
  r.attacker_chance = 0.5;
  r.utility.accuracy = 0.985;
  r.utility.f1 = 0.98;
  r.utility.auc_roc = std::nullopt;
  r.utility.avg_precision = 1.0 / 3.0;
  return r;
}

bool SameOptional(const std::optional<double>& a,
                  const std::optional<double>& b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

TEST(FormatDoubleTest, RoundTripsRandomBitPatterns) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t bits = rng();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    if (std::isnan(v)) continue;
    EXPECT_EQ(ParseDouble(FormatDouble(v)), v) << FormatDouble(v);
  }
}

TEST(FormatDoubleTest, NonFiniteSpellings) {
  EXPECT_EQ(FormatDouble(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(FormatDouble(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(FormatDouble(std::nan("")), "nan");
  EXPECT_TRUE(std::isnan(ParseDouble("nan")));
  EXPECT_EQ(FormatDouble(0.5), "0.5");
}

TEST(ParseDoubleTest, RejectsTrailingGarbageAndEmpty) {
  for (const char* bad : {"", "1.5x", "abc", " 1"}) {
    try {
      ParseDouble(bad);
      FAIL() << "expected a format error for '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    }
  }
}

TEST(HexFingerprintTest, SixteenLowercaseDigitsAndRoundTrip) {
  EXPECT_EQ(HexFingerprint(0xabcULL), "0000000000000abc");
  EXPECT_EQ(ParseHexFingerprint("ffffffffffffffff"), ~0ULL);
  EXPECT_EQ(ParseHexFingerprint(HexFingerprint(0x0123456789abcdefULL)),
            0x0123456789abcdefULL);
  EXPECT_THROW(ParseHexFingerprint("xyz"), Error);
}

TEST(KvRecordTest, SerializeKeepsFieldOrder) {
  KvRecord r("epoch");
  r.Add("epoch", 3).Add("recon_loss", 0.25).Add("ok", true);
  EXPECT_EQ(r.Serialize(), "record=epoch epoch=3 recon_loss=0.25 ok=true");
}

TEST(KvRecordTest, EscapedValuesRoundTrip) {
  KvRecord r("meta");
  r.Add("path", "a b=c\\d\ne").Add("empty", "").Add("k=y", "v");
  const KvRecord back = KvRecord::Parse(r.Serialize());
  EXPECT_EQ(back.fields(), r.fields());
  EXPECT_EQ(r.Serialize().find('\n'), std::string::npos);
}

TEST(KvRecordTest, RandomFieldsRoundTrip) {
  Rng rng(2);
  const std::string alphabet = "ab =\\\nz9._-";
  for (int trial = 0; trial < 500; ++trial) {
    KvRecord r;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int f = 0; f < n; ++f) {
      std::string key, value;
      const int klen = 1 + static_cast<int>(rng() % 6);
      const int vlen = static_cast<int>(rng() % 8);
      for (int i = 0; i < klen; ++i) key += alphabet[rng() % alphabet.size()];
      for (int i = 0; i < vlen; ++i) value += alphabet[rng() % alphabet.size()];
      r.Add(key, value);
    }
    EXPECT_EQ(KvRecord::Parse(r.Serialize()).fields(), r.fields());
  }
}

TEST(KvRecordTest, FieldWithoutEqualsIsFormatError) {
  try {
    KvRecord::Parse("record=x lonely");
    FAIL() << "expected a format error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
}

TEST(KvRecordTest, GettersNameMissingOrBadFields) {
  KvRecord r("x");
  r.Add("n", "12").Add("d", "nope");
  EXPECT_EQ(r.GetUint("n"), 12u);
  EXPECT_FALSE(r.Find("missing").has_value());
  for (auto call : {+[](const KvRecord& k) { k.Get("missing"); },
                    +[](const KvRecord& k) { k.GetDouble("d"); },
                    +[](const KvRecord& k) { k.GetUint("d"); }}) {
    try {
      call(r);
      FAIL() << "expected a format error";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    }
  }
}

TEST(KvFileTest, WriteThenReadIsIdentity) {
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() /
      ("lsp_report_test_" + std::to_string(::getpid()) + ".kv");
  const std::vector<KvRecord> records = SampleReport("a", "lsp").ToRecords();
  WriteKvFile(path, records);
  const std::vector<KvRecord> back = ReadKvFile(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i].fields(), records[i].fields());
  }
}

TEST(MetricsReportTest, RecordsRoundTripExactly) {
  MetricsReport r = SampleReport("lsp_run", "lsp");
  r.fidelity = FidelityMetrics{0.01, std::numeric_limits<double>::infinity(),
                               0.875};
  r.fairness = FairnessReport{0.125, std::nullopt};
  r.latency.push_back({"encode", 64, 0.5, 0.01, 5});
  const MetricsReport b = MetricsReport::FromRecords(r.ToRecords());
  EXPECT_EQ(b.experiment, r.experiment);
  EXPECT_EQ(b.method, r.method);
  EXPECT_EQ(b.seed, r.seed);
  EXPECT_EQ(b.config_fingerprint, r.config_fingerprint);
  EXPECT_EQ(b.dataset_fingerprint, r.dataset_fingerprint);
  EXPECT_EQ(b.n_train, r.n_train);
  EXPECT_EQ(b.n_test, r.n_test);
  EXPECT_EQ(b.privacy_protection, r.privacy_protection);
  EXPECT_EQ(b.attacker_accuracy_obf, r.attacker_accuracy_obf);
  EXPECT_EQ(b.utility.accuracy, r.utility.accuracy);
  EXPECT_TRUE(SameOptional(b.utility.f1, r.utility.f1));
  EXPECT_TRUE(SameOptional(b.utility.auc_roc, r.utility.auc_roc));
  EXPECT_TRUE(SameOptional(b.utility.avg_precision, r.utility.avg_precision));
  ASSERT_TRUE(b.fidelity.has_value());
  EXPECT_EQ(b.fidelity->psnr_db, r.fidelity->psnr_db);
  ASSERT_TRUE(b.fairness.has_value());
  EXPECT_FALSE(b.fairness->equal_opportunity_diff.has_value());
  ASSERT_EQ(b.latency.size(), 1u);
  EXPECT_EQ(b.latency[0].stage, "encode");
  EXPECT_EQ(b.latency[0].n, 5u);
}

TEST(MetricsReportTest, MetaRecordComesFirstWithSeedAndFingerprint) {
  const std::vector<KvRecord> rec = SampleReport("x", "raw").ToRecords();
  ASSERT_GE(rec.size(), 3u);
  EXPECT_EQ(rec[0].type(), "meta");
  EXPECT_TRUE(rec[0].Find("seed").has_value());
  EXPECT_TRUE(rec[0].Find("config_fingerprint").has_value());
}

TEST(MetricsReportTest, MissingMandatoryRecordIsFormatError) {
  std::vector<KvRecord> rec = SampleReport("x", "raw").ToRecords();
  rec.erase(rec.begin() + 1);
  try {
    MetricsReport::FromRecords(rec);
    FAIL() << "expected a format error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
}

TEST(MetricsReportTest, UnknownRecordTypeIsFormatError) {
  std::vector<KvRecord> rec = SampleReport("x", "raw").ToRecords();
  rec.push_back(KvRecord("mystery"));
  EXPECT_THROW(MetricsReport::FromRecords(rec), Error);
}

TEST(MetricsReportTest, TextShowsPercentages) {
  const std::string text = SampleReport("x", "lsp").ToText();
  EXPECT_NE(text.find("protection:         10.0 %"), std::string::npos) << text;
  EXPECT_NE(text.find("accuracy:           98.5 %"), std::string::npos) << text;
  EXPECT_NE(text.find("auc_roc:            n/a"), std::string::npos) << text;
}

TEST(CompareTest, ColumnOrderMatchesDocumentedSchema) {
  const std::vector<MetricsReport> reports = {SampleReport("raw_run", "raw"),
                                              SampleReport("lsp_run", "lsp")};
  const std::vector<KvRecord> rec = CompareRecords(reports);
  ASSERT_EQ(rec.size(), 3u);
  EXPECT_EQ(rec[0].type(), "compare_meta");
  EXPECT_EQ(rec[0].GetUint("rows"), 2u);
  const auto& fields = rec[1].fields();
  ASSERT_EQ(fields.size(), 2 + std::size(kCompareColumns));
  EXPECT_EQ(fields[0].first, "record");
  EXPECT_EQ(fields[1].first, "config_fingerprint");
  for (std::size_t i = 0; i < std::size(kCompareColumns); ++i) {
    EXPECT_EQ(fields[2 + i].first, kCompareColumns[i]);
  }
  EXPECT_EQ(rec[1].Get("method"), "raw");
  EXPECT_EQ(rec[2].Get("method"), "lsp");
  EXPECT_EQ(rec[1].Get("psnr_db"), "na");
}

TEST(CompareTest, TextTableHasHeaderRuleAndOneLinePerRun) {
  const std::string text = CompareText(
      {SampleReport("raw_run", "raw"), SampleReport("lsp_run", "lsp")});
  std::vector<std::string> lines;
  std::string line;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(line);
      line.clear();
    } else {
      line += c;
    }
  }
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[1].rfind("experiment", 0), 0u);
  EXPECT_EQ(lines[2].find_first_not_of('-'), std::string::npos);
  EXPECT_EQ(lines[1].size(), lines[2].size());
  EXPECT_EQ(lines[3].size(), lines[1].size());
  EXPECT_EQ(lines[3].rfind("raw_run", 0), 0u);
}

TEST(CompareTest, DifferentDatasetsAreNotComparable) {
  MetricsReport other = SampleReport("b", "lsp");
  other.dataset_fingerprint ^= 1;
  try {
    CheckComparable({SampleReport("a", "raw"), other});
    FAIL() << "expected a data error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    EXPECT_NE(std::string(e.what()).find("not comparable"), std::string::npos);
  }
}

TEST(CompareTest, DifferentSeedsOrSingleReportAreRejected) {
  MetricsReport other = SampleReport("b", "lsp");
  other.seed = 8;
  EXPECT_THROW(CheckComparable({SampleReport("a", "raw"), other}), Error);
  EXPECT_THROW(CheckComparable({SampleReport("a", "raw")}), Error);
}

}  // namespace
}  // namespace lsp
