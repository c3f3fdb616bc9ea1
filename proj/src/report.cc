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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "lsp/error.h"

namespace lsp {

// ---------------------------------------------------------------------------
// Scalars

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw FormatError("not a number: '" + text + "'");
  }
  return v;
}

std::string HexFingerprint(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t ParseHexFingerprint(const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v, 16);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw FormatError("not a hex fingerprint: '" + text + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// KvRecord

namespace {

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case ' ':
      case '=':
      case '\\':
        out += '\\';
        out += c;
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

KvRecord& KvRecord::Add(const std::string& key, const std::string& value) {
  fields_.emplace_back(key, value);
  return *this;
}
KvRecord& KvRecord::Add(const std::string& key, const char* value) {
  return Add(key, std::string(value));
}
KvRecord& KvRecord::Add(const std::string& key, double value) {
  return Add(key, FormatDouble(value));
}
KvRecord& KvRecord::Add(const std::string& key, std::uint64_t value) {
  return Add(key, std::to_string(value));
}
KvRecord& KvRecord::Add(const std::string& key, int value) {
  return Add(key, std::to_string(value));
}
KvRecord& KvRecord::Add(const std::string& key, bool value) {
  return Add(key, std::string(value ? "true" : "false"));
}

std::optional<std::string> KvRecord::Find(const std::string& key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KvRecord::Get(const std::string& key) const {
  auto v = Find(key);
  if (!v) {
    throw FormatError("record '" + type() + "' has no field '" + key + "'");
  }
  return *v;
}

double KvRecord::GetDouble(const std::string& key) const {
  return ParseDouble(Get(key));
}

std::uint64_t KvRecord::GetUint(const std::string& key) const {
  const std::string text = Get(key);
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw FormatError("field '" + key + "' is not an unsigned integer: '" +
                      text + "'");
  }
  return v;
}

std::string KvRecord::Serialize() const {
  std::string out;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (i > 0) out += ' ';
    out += Escape(fields_[i].first);
    out += '=';
    out += Escape(fields_[i].second);
  }
  return out;
}

KvRecord KvRecord::Parse(const std::string& line) {
  KvRecord r;
  std::string key, value;
  bool in_value = false;
  auto flush = [&] {
    if (!in_value) {
      throw FormatError("field without '=' in record line: " + line);
    }
    r.fields_.emplace_back(key, value);
    key.clear();
    value.clear();
    in_value = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '\\' && i + 1 < line.size()) {
      c = line[++i];
      if (c == 'n') c = '\n';
      (in_value ? value : key) += c;
    } else if (c == '=' && !in_value) {
      in_value = true;
    } else if (c == ' ') {
      flush();
    } else {
      (in_value ? value : key) += c;
    }
  }
  if (!key.empty() || in_value) flush();
  return r;
}

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  if (!out) throw IoError("write failed: " + path.string());
}

void WriteKvFile(const std::filesystem::path& path,
                 const std::vector<KvRecord>& records) {
  std::string text;
  for (const KvRecord& r : records) text += r.Serialize() + "\n";
  WriteTextFile(path, text);
}

std::vector<KvRecord> ReadKvFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<KvRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(KvRecord::Parse(line));
  }
  return out;
}

// ---------------------------------------------------------------------------
// MetricsReport

namespace {

std::string OptionalText(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : "na";
}

std::optional<double> ParseOptional(const KvRecord& r, const std::string& k) {
  const std::string v = r.Get(k);
  if (v == "na") return std::nullopt;
  return ParseDouble(v);
}

std::string Fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string FixedOpt(const std::optional<double>& v, int digits) {
  return v ? Fixed(*v, digits) : "n/a";
}

}  // namespace

std::vector<KvRecord> MetricsReport::ToRecords() const {
  std::vector<KvRecord> out;
  out.push_back(KvRecord("meta")
                    .Add("experiment", experiment)
                    .Add("method", method)
                    .Add("seed", seed)
                    .Add("config_fingerprint", HexFingerprint(config_fingerprint))
                    .Add("dataset_fingerprint",
                         HexFingerprint(dataset_fingerprint))
                    .Add("n_train", static_cast<std::uint64_t>(n_train))
                    .Add("n_test", static_cast<std::uint64_t>(n_test)));
  out.push_back(KvRecord("privacy")
                    .Add("privacy_protection", privacy_protection)
                    .Add("attacker_accuracy_raw", attacker_accuracy_raw)
                    .Add("attacker_accuracy_obf", attacker_accuracy_obf)
                    .Add("attacker_chance", attacker_chance));
  out.push_back(KvRecord("utility")
                    .Add("accuracy", utility.accuracy)
                    .Add("f1", OptionalText(utility.f1))
                    .Add("auc_roc", OptionalText(utility.auc_roc))
                    .Add("avg_precision", OptionalText(utility.avg_precision)));
  if (fidelity) {
    out.push_back(KvRecord("fidelity")
                      .Add("mse", fidelity->mse)
                      .Add("psnr_db", fidelity->psnr_db)
                      .Add("ssim", fidelity->ssim));
  }
  if (fairness) {
    out.push_back(
        KvRecord("fairness")
            .Add("demographic_parity_diff", fairness->demographic_parity_diff)
            .Add("equal_opportunity_diff",
                 OptionalText(fairness->equal_opportunity_diff)));
  }
  for (const LatencyEntry& e : latency) {
    out.push_back(KvRecord("latency")
                      .Add("stage", e.stage)
                      .Add("batch_size", static_cast<std::uint64_t>(e.batch_size))
                      .Add("mean_ms", e.mean_ms)
                      .Add("stddev_ms", e.stddev_ms)
                      .Add("n", static_cast<std::uint64_t>(e.n)));
  }
  return out;
}

MetricsReport MetricsReport::FromRecords(const std::vector<KvRecord>& records) {
  MetricsReport m;
  bool have_meta = false, have_privacy = false, have_utility = false;
  for (const KvRecord& r : records) {
    const std::string type = r.type();
    if (type == "meta") {
      have_meta = true;
      m.experiment = r.Get("experiment");
      m.method = r.Get("method");
      m.seed = r.GetUint("seed");
      m.config_fingerprint = ParseHexFingerprint(r.Get("config_fingerprint"));
      m.dataset_fingerprint =
          ParseHexFingerprint(r.Get("dataset_fingerprint"));
      m.n_train = r.GetUint("n_train");
      m.n_test = r.GetUint("n_test");
    } else if (type == "privacy") {
      have_privacy = true;
      m.privacy_protection = r.GetDouble("privacy_protection");
      m.attacker_accuracy_raw = r.GetDouble("attacker_accuracy_raw");
      m.attacker_accuracy_obf = r.GetDouble("attacker_accuracy_obf");
      m.attacker_chance = r.GetDouble("attacker_chance");
    } else if (type == "utility") {
      have_utility = true;
      m.utility.accuracy = r.GetDouble("accuracy");
      m.utility.f1 = ParseOptional(r, "f1");
      m.utility.auc_roc = ParseOptional(r, "auc_roc");
      m.utility.avg_precision = ParseOptional(r, "avg_precision");
    } else if (type == "fidelity") {
      m.fidelity = FidelityMetrics{r.GetDouble("mse"), r.GetDouble("psnr_db"),
                                   r.GetDouble("ssim")};
    } else if (type == "fairness") {
      m.fairness = FairnessReport{r.GetDouble("demographic_parity_diff"),
                                  ParseOptional(r, "equal_opportunity_diff")};
    } else if (type == "latency") {
      m.latency.push_back(LatencyEntry{r.Get("stage"), r.GetUint("batch_size"),
                                       r.GetDouble("mean_ms"),
                                       r.GetDouble("stddev_ms"),
                                       r.GetUint("n")});
    } else {
      throw FormatError("report: unknown record type '" + type + "'");
    }
  }
  if (!have_meta || !have_privacy || !have_utility) {
    throw FormatError(
        "report: missing one of the mandatory meta, privacy, utility records");
  }
  return m;
}

std::string MetricsReport::ToText() const {
  std::ostringstream os;
  os << "experiment:           " << experiment << "\n"
     << "method:               " << method << "\n"
     << "seed:                 " << seed << "\n"
     << "config fingerprint:   " << HexFingerprint(config_fingerprint) << "\n"
     << "dataset fingerprint:  " << HexFingerprint(dataset_fingerprint) << "\n"
     << "rows (train/test):    " << n_train << " / " << n_test << "\n\n"
     << "privacy\n"
     << "  protection:         " << Fixed(100 * privacy_protection, 1) << " %\n"
     << "  attacker raw:       " << Fixed(100 * attacker_accuracy_raw, 1)
     << " %\n"
     << "  attacker released:  " << Fixed(100 * attacker_accuracy_obf, 1)
     << " %\n"
     << "  chance:             " << Fixed(100 * attacker_chance, 1) << " %\n\n"
     << "utility\n"
     << "  accuracy:           " << Fixed(100 * utility.accuracy, 1) << " %\n"
     << "  f1:                 " << FixedOpt(utility.f1, 4) << "\n"
     << "  auc_roc:            " << FixedOpt(utility.auc_roc, 4) << "\n"
     << "  avg_precision:      " << FixedOpt(utility.avg_precision, 4) << "\n";
  if (fidelity) {
    os << "\nfidelity\n"
       << "  mse:                " << Fixed(fidelity->mse, 6) << "\n"
       << "  psnr:               " << Fixed(fidelity->psnr_db, 2) << " dB\n"
       << "  ssim:               " << Fixed(fidelity->ssim, 4) << "\n";
  }
  if (fairness) {
    os << "\nfairness\n"
       << "  demographic parity: "
       << Fixed(fairness->demographic_parity_diff, 4) << "\n"
       << "  equal opportunity:  "
       << FixedOpt(fairness->equal_opportunity_diff, 4) << "\n";
  }
  if (!latency.empty()) {
    os << "\nlatency (ms)\n";
    for (const LatencyEntry& e : latency) {
      os << "  " << e.stage << " batch=" << e.batch_size
         << " mean=" << Fixed(e.mean_ms, 4) << " sd=" << Fixed(e.stddev_ms, 4)
         << " n=" << e.n << "\n";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Comparison

void CheckComparable(const std::vector<MetricsReport>& reports) {
  if (reports.size() < 2) {
    throw ConfigError("compare: needs at least two reports, got " +
                      std::to_string(reports.size()));
  }
  const MetricsReport& first = reports.front();
  for (const MetricsReport& r : reports) {
    if (r.dataset_fingerprint != first.dataset_fingerprint) {
      throw DataError("compare: runs are not comparable: dataset fingerprint " +
                      HexFingerprint(r.dataset_fingerprint) + " (" +
                      r.experiment + ") differs from " +
                      HexFingerprint(first.dataset_fingerprint) + " (" +
                      first.experiment + ")");
    }
    if (r.seed != first.seed) {
      throw DataError("compare: runs are not comparable: seed " +
                      std::to_string(r.seed) + " (" + r.experiment +
                      ") differs from " + std::to_string(first.seed) + " (" +
                      first.experiment + ")");
    }
  }
}

namespace {

std::vector<std::string> CompareRow(const MetricsReport& r, bool text) {
  auto num = [text](double v) { return text ? Fixed(v, 4) : FormatDouble(v); };
  auto opt = [text](const std::optional<double>& v) {
    return text ? FixedOpt(v, 4) : OptionalText(v);
  };
  std::optional<double> psnr, ssim, dp, eo;
  if (r.fidelity) {
    psnr = r.fidelity->psnr_db;
    ssim = r.fidelity->ssim;
  }
  if (r.fairness) {
    dp = r.fairness->demographic_parity_diff;
    eo = r.fairness->equal_opportunity_diff;
  }
  return {r.experiment,
          r.method,
          num(r.utility.accuracy),
          opt(r.utility.f1),
          opt(r.utility.auc_roc),
          opt(r.utility.avg_precision),
          num(r.privacy_protection),
          num(r.attacker_accuracy_raw),
          num(r.attacker_accuracy_obf),
          opt(psnr),
          opt(ssim),
          opt(dp),
          opt(eo)};
}

}  // namespace

std::vector<KvRecord> CompareRecords(const std::vector<MetricsReport>& reports) {
  CheckComparable(reports);
  std::vector<KvRecord> out;
  out.push_back(KvRecord("compare_meta")
                    .Add("seed", reports.front().seed)
                    .Add("dataset_fingerprint",
                         HexFingerprint(reports.front().dataset_fingerprint))
                    .Add("rows", static_cast<std::uint64_t>(reports.size())));
  for (const MetricsReport& r : reports) {
    KvRecord rec("row");
    rec.Add("config_fingerprint", HexFingerprint(r.config_fingerprint));
    const std::vector<std::string> cells = CompareRow(r, false);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      rec.Add(kCompareColumns[i], cells[i]);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string CompareText(const std::vector<MetricsReport>& reports) {
  CheckComparable(reports);
  constexpr std::size_t kCols = std::size(kCompareColumns);
  std::vector<std::vector<std::string>> table;
  table.emplace_back(std::begin(kCompareColumns), std::end(kCompareColumns));
  for (const MetricsReport& r : reports) table.push_back(CompareRow(r, true));
  std::vector<std::size_t> width(kCols, 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < kCols; ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream os;
  os << "seed " << reports.front().seed << ", dataset "
     << HexFingerprint(reports.front().dataset_fingerprint) << "\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t c = 0; c < kCols; ++c) {
      if (c > 0) os << "  ";
      const std::string& cell = table[i][c];
      // Text columns left-aligned, numbers right-aligned.
      if (c < 2) {
        os << cell << std::string(width[c] - cell.size(), ' ');
      } else {
        os << std::string(width[c] - cell.size(), ' ') << cell;
      }
    }
    os << "\n";
    if (i == 0) {
      std::size_t total = 2 * (kCols - 1);
      for (std::size_t w : width) total += w;
      os << std::string(total, '-') << "\n";
    }
  }
  return os.str();
}

}  // namespace lsp
