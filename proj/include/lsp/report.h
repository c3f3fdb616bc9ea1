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

#ifndef LSP_REPORT_H_
#define LSP_REPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lsp {

// ---- Key=value records ----
//
// One record per line: space-separated key=value fields in a fixed order.
// Backslash escapes spaces, '=', backslashes and newlines inside values.

class KvRecord {
 public:
  KvRecord() = default;
  explicit KvRecord(const std::string& type) { Add("record", type); }

  KvRecord& Add(const std::string& key, const std::string& value);
  KvRecord& Add(const std::string& key, const char* value);
  KvRecord& Add(const std::string& key, double value);
  KvRecord& Add(const std::string& key, std::uint64_t value);
  KvRecord& Add(const std::string& key, int value);
  KvRecord& Add(const std::string& key, bool value);

  const std::vector<std::pair<std::string, std::string>>& fields() const {
    return fields_;
  }
  // Empty when absent.
  std::optional<std::string> Find(const std::string& key) const;
  // Throws a format error naming the key when absent or unparsable.
  std::string Get(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  std::uint64_t GetUint(const std::string& key) const;
  std::string type() const { return Find("record").value_or(""); }

  std::string Serialize() const;
  static KvRecord Parse(const std::string& line);

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

// Shortest decimal text that round-trips to the same double; "inf", "-inf"
// and "nan" for non-finite values.
std::string FormatDouble(double v);
double ParseDouble(const std::string& text);
std::string HexFingerprint(std::uint64_t v);
std::uint64_t ParseHexFingerprint(const std::string& text);

void WriteKvFile(const std::filesystem::path& path,
                 const std::vector<KvRecord>& records);
std::vector<KvRecord> ReadKvFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path,
                   const std::string& contents);

// ---- Metrics report ----

struct UtilityMetrics {
  double accuracy = 0.0;
  // Binary utility tasks only.
  std::optional<double> f1;
  std::optional<double> auc_roc;
  std::optional<double> avg_precision;
};

struct FidelityMetrics {
  double mse = 0.0;
  double psnr_db = 0.0;  // may be +inf
  double ssim = 0.0;
};

struct FairnessReport {
  double demographic_parity_diff = 0.0;
  std::optional<double> equal_opportunity_diff;
};

struct LatencyEntry {
  std::string stage;
  std::size_t batch_size = 0;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  std::size_t n = 0;
};

struct MetricsReport {
  std::string experiment;
  std::string method;
  std::uint64_t seed = 0;
  std::uint64_t config_fingerprint = 0;
  std::uint64_t dataset_fingerprint = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;

  double privacy_protection = 0.0;
  double attacker_accuracy_raw = 0.0;
  double attacker_accuracy_obf = 0.0;
  double attacker_chance = 0.0;
  UtilityMetrics utility;
  std::optional<FidelityMetrics> fidelity;
  std::optional<FairnessReport> fairness;
  std::vector<LatencyEntry> latency;

  std::vector<KvRecord> ToRecords() const;
  static MetricsReport FromRecords(const std::vector<KvRecord>& records);
  std::string ToText() const;
};

// Column order of the comparison table.
inline constexpr const char* kCompareColumns[] = {
    "experiment",      "method",         "accuracy",
    "f1",              "auc_roc",        "avg_precision",
    "privacy_protection", "attacker_accuracy_raw", "attacker_accuracy_obf",
    "psnr_db",         "ssim",           "demographic_parity_diff",
    "equal_opportunity_diff"};

// Throws a data error when the reports disagree on dataset fingerprint or
// seed, or when fewer than two reports are given.
void CheckComparable(const std::vector<MetricsReport>& reports);
std::vector<KvRecord> CompareRecords(const std::vector<MetricsReport>& reports);
std::string CompareText(const std::vector<MetricsReport>& reports);

}  // namespace lsp

#endif  // LSP_REPORT_H_
