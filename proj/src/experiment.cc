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

#include "lsp/experiment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <sstream>

#include "lsp/k_anonymity.h"
#include "lsp/metrics.h"
#include "lsp/model_io.h"
#include "lsp/random.h"

namespace lsp {

const char* MethodName(Method m) {
  switch (m) {
    case Method::kLsp:
      return "lsp";
    case Method::kRaw:
      return "raw";
    case Method::kKAnonymity:
      return "k_anonymity";
    case Method::kDp:
      return "dp";
  }
  return "unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kData:
    case ErrorKind::kFormat:
    case ErrorKind::kIo:
    case ErrorKind::kShape:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
    case ErrorKind::kContract:
      return 1;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Config values

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  if (Trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Trim(item));
  return out;
}

std::string JoinList(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += items[i];
  }
  return out;
}

std::uint64_t ParseUintValue(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config: " + key + " expects a non-negative integer, got '" +
                      v + "'");
  }
  return out;
}

double ParseRealValue(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  }
  return out;
}

bool ParseBoolValue(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: " + key + " expects true or false, got '" + v +
                    "'");
}

std::vector<std::size_t> ParseSizeList(const std::string& key,
                                       const std::string& v) {
  std::vector<std::size_t> out;
  for (const std::string& item : SplitList(v)) {
    out.push_back(static_cast<std::size_t>(ParseUintValue(key, item)));
  }
  return out;
}

std::string SizeListText(const std::vector<std::size_t>& v) {
  std::vector<std::string> items;
  for (std::size_t x : v) items.push_back(std::to_string(x));
  return JoinList(items);
}

ColumnRef ParseColumnRef(const std::string& v) {
  if (!v.empty() && std::all_of(v.begin(), v.end(), [](char c) {
        return c >= '0' && c <= '9';
      })) {
    return static_cast<std::size_t>(std::stoull(v));
  }
  return v;
}

std::string ColumnRefText(const ColumnRef& c) {
  if (const auto* i = std::get_if<std::size_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string ColumnListText(const std::vector<ColumnRef>& v) {
  std::vector<std::string> items;
  for (const ColumnRef& c : v) items.push_back(ColumnRefText(c));
  return JoinList(items);
}

std::vector<ColumnRef> ParseColumnList(const std::string& v) {
  std::vector<ColumnRef> out;
  for (const std::string& item : SplitList(v)) {
    out.push_back(ParseColumnRef(item));
  }
  return out;
}

std::string PathListText(const std::vector<std::filesystem::path>& v) {
  std::vector<std::string> items;
  for (const auto& p : v) items.push_back(p.string());
  return JoinList(items);
}

std::string Real(double v) { return FormatDouble(v); }
std::string Bool(bool v) { return v ? "true" : "false"; }

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& v) {
  if (v.empty()) return {};
  std::filesystem::path p(v);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

struct KeySpec {
  const char* key;
  // Included in the fingerprint.
  bool identity;
  std::function<void(RunConfig&, const std::string&,
                     const std::filesystem::path&)>
      set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeySpec>& KeySpecs() {
  using P = std::filesystem::path;
  static const std::vector<KeySpec> specs = {
      {"experiment.name", true,
       [](RunConfig& c, const std::string& v, const P&) { c.experiment = v; },
       [](const RunConfig& c) { return c.experiment; }},
      {"seed", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.seed = ParseUintValue("seed", v);
       },
       [](const RunConfig& c) {
         return c.seed ? std::to_string(*c.seed) : std::string("unset");
       }},
      {"method", true,
       [](RunConfig& c, const std::string& v, const P&) {
         if (v == "lsp") {
           c.method = Method::kLsp;
         } else if (v == "raw") {
           c.method = Method::kRaw;
         } else if (v == "k_anonymity") {
           c.method = Method::kKAnonymity;
         } else if (v == "dp") {
           c.method = Method::kDp;
         } else {
           throw ConfigError("config: method must be one of lsp, raw, "
                             "k_anonymity, dp; got '" + v + "'");
         }
       },
       [](const RunConfig& c) { return std::string(MethodName(c.method)); }},
      {"data.source", true,
       [](RunConfig& c, const std::string& v, const P&) {
         if (v == "synthetic") {
           c.source = DataSource::kSynthetic;
         } else if (v == "delimited") {
           c.source = DataSource::kDelimited;
         } else if (v == "idx") {
           c.source = DataSource::kIdx;
         } else {
           throw ConfigError("config: data.source must be synthetic, "
                             "delimited or idx; got '" + v + "'");
         }
       },
       [](const RunConfig& c) {
         switch (c.source) {
           case DataSource::kSynthetic:
             return std::string("synthetic");
           case DataSource::kDelimited:
             return std::string("delimited");
           case DataSource::kIdx:
             return std::string("idx");
         }
         return std::string();
       }},
      {"data.train_fraction", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.train_fraction = ParseRealValue("data.train_fraction", v);
       },
       [](const RunConfig& c) { return Real(c.train_fraction); }},
      {"data.synthetic.n_per_class", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.synth.n_per_class = ParseUintValue("data.synthetic.n_per_class", v);
       },
       [](const RunConfig& c) { return std::to_string(c.synth.n_per_class); }},
      {"data.synthetic.seed", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.synth.seed = ParseUintValue("data.synthetic.seed", v);
         c.synth_seed_set = true;
       },
       [](const RunConfig& c) {
         return c.synth_seed_set ? std::to_string(c.synth.seed)
                                 : std::string("run");
       }},
      {"data.synthetic.informative_features", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.synth.informative_features =
             ParseUintValue("data.synthetic.informative_features", v);
       },
       [](const RunConfig& c) {
         return std::to_string(c.synth.informative_features);
       }},
      {"data.synthetic.nuisance_features", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.synth.nuisance_features =
             ParseUintValue("data.synthetic.nuisance_features", v);
       },
       [](const RunConfig& c) {
         return std::to_string(c.synth.nuisance_features);
       }},
      {"data.path", true,
       [](RunConfig& c, const std::string& v, const P& base) {
         c.data_path = Resolve(base, v);
       },
       [](const RunConfig& c) { return c.data_path.string(); }},
      {"data.delimiter", true,
       [](RunConfig& c, const std::string& v, const P&) {
         if (v == "tab") {
           c.schema.delimiter = '\t';
         } else if (v.size() == 1) {
           c.schema.delimiter = v[0];
         } else {
           throw ConfigError("config: data.delimiter must be one character "
                             "or 'tab'; got '" + v + "'");
         }
       },
       [](const RunConfig& c) {
         return c.schema.delimiter == '\t' ? std::string("tab")
                                           : std::string(1, c.schema.delimiter);
       }},
      {"data.header", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.schema.header = ParseBoolValue("data.header", v);
       },
       [](const RunConfig& c) { return Bool(c.schema.header); }},
      {"data.utility_column", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.schema.utility_column = ParseColumnRef(v);
       },
       [](const RunConfig& c) { return ColumnRefText(c.schema.utility_column); }},
      {"data.sensitive_column", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.schema.sensitive_column = ParseColumnRef(v);
       },
       [](const RunConfig& c) {
         return ColumnRefText(c.schema.sensitive_column);
       }},
      {"data.feature_columns", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.schema.feature_columns = ParseColumnList(v);
       },
       [](const RunConfig& c) {
         return ColumnListText(c.schema.feature_columns);
       }},
      {"data.categorical_columns", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.schema.categorical_columns = ParseColumnList(v);
       },
       [](const RunConfig& c) {
         return ColumnListText(c.schema.categorical_columns);
       }},
      {"data.idx.images_a", true,
       [](RunConfig& c, const std::string& v, const P& base) {
         c.idx_images[0] = Resolve(base, v);
       },
       [](const RunConfig& c) { return c.idx_images[0].string(); }},
      {"data.idx.labels_a", true,
       [](RunConfig& c, const std::string& v, const P& base) {
         c.idx_labels[0] = Resolve(base, v);
       },
       [](const RunConfig& c) { return c.idx_labels[0].string(); }},
      {"data.idx.images_b", true,
       [](RunConfig& c, const std::string& v, const P& base) {
         c.idx_images[1] = Resolve(base, v);
       },
       [](const RunConfig& c) { return c.idx_images[1].string(); }},
      {"data.idx.labels_b", true,
       [](RunConfig& c, const std::string& v, const P& base) {
         c.idx_labels[1] = Resolve(base, v);
       },
       [](const RunConfig& c) { return c.idx_labels[1].string(); }},
      {"data.idx.limit", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.idx_limit = ParseUintValue("data.idx.limit", v);
       },
       [](const RunConfig& c) { return std::to_string(c.idx_limit); }},
      {"lsp.z_s_dim", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.z_s_dim = ParseUintValue("lsp.z_s_dim", v);
       },
       [](const RunConfig& c) { return std::to_string(c.lsp.z_s_dim); }},
      {"lsp.z_ns_dim", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.z_ns_dim = ParseUintValue("lsp.z_ns_dim", v);
       },
       [](const RunConfig& c) { return std::to_string(c.lsp.z_ns_dim); }},
      {"lsp.lambda_priv", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.lambda_priv = ParseRealValue("lsp.lambda_priv", v);
       },
       [](const RunConfig& c) { return Real(c.lsp.lambda_priv); }},
      {"lsp.alpha_sens", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.alpha_sens = ParseRealValue("lsp.alpha_sens", v);
       },
       [](const RunConfig& c) { return Real(c.lsp.alpha_sens); }},
      {"lsp.epochs", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.epochs = static_cast<int>(ParseUintValue("lsp.epochs", v));
       },
       [](const RunConfig& c) { return std::to_string(c.lsp.epochs); }},
      {"lsp.batch_size", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.batch_size = ParseUintValue("lsp.batch_size", v);
       },
       [](const RunConfig& c) { return std::to_string(c.lsp.batch_size); }},
      {"lsp.learning_rate", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.learning_rate = ParseRealValue("lsp.learning_rate", v);
       },
       [](const RunConfig& c) { return Real(c.lsp.learning_rate); }},
      {"lsp.disc_lr_scale", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.disc_lr_scale = ParseRealValue("lsp.disc_lr_scale", v);
       },
       [](const RunConfig& c) { return Real(c.lsp.disc_lr_scale); }},
      {"lsp.checkpoint_every", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.lsp.checkpoint_every =
             static_cast<int>(ParseUintValue("lsp.checkpoint_every", v));
       },
       [](const RunConfig& c) { return std::to_string(c.lsp.checkpoint_every); }},
      {"k_anonymity.k", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.k = ParseUintValue("k_anonymity.k", v);
       },
       [](const RunConfig& c) { return std::to_string(c.k); }},
      {"k_anonymity.quasi_ids", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.quasi_ids = ParseSizeList("k_anonymity.quasi_ids", v);
       },
       [](const RunConfig& c) { return SizeListText(c.quasi_ids); }},
      {"dp.epsilon", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.dp.epsilon = ParseRealValue("dp.epsilon", v);
       },
       [](const RunConfig& c) { return Real(c.dp.epsilon); }},
      {"dp.delta", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.dp.delta = ParseRealValue("dp.delta", v);
       },
       [](const RunConfig& c) { return Real(c.dp.delta); }},
      {"dp.clip_bound", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.dp.clip_bound = ParseRealValue("dp.clip_bound", v);
       },
       [](const RunConfig& c) { return Real(c.dp.clip_bound); }},
      {"dp.mechanism", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.dp.mechanism = ParseDpMechanism(v);
       },
       [](const RunConfig& c) {
         return std::string(DpMechanismName(c.dp.mechanism));
       }},
      {"classifier.hidden", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.classifier.hidden = ParseSizeList("classifier.hidden", v);
       },
       [](const RunConfig& c) { return SizeListText(c.classifier.hidden); }},
      {"classifier.epochs", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.classifier.epochs =
             static_cast<int>(ParseUintValue("classifier.epochs", v));
       },
       [](const RunConfig& c) { return std::to_string(c.classifier.epochs); }},
      {"classifier.batch_size", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.classifier.batch_size = ParseUintValue("classifier.batch_size", v);
       },
       [](const RunConfig& c) {
         return std::to_string(c.classifier.batch_size);
       }},
      {"classifier.learning_rate", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.classifier.learning_rate =
             ParseRealValue("classifier.learning_rate", v);
       },
       [](const RunConfig& c) { return Real(c.classifier.learning_rate); }},
      {"eval.fidelity", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.eval_fidelity = ParseBoolValue("eval.fidelity", v);
       },
       [](const RunConfig& c) { return Bool(c.eval_fidelity); }},
      {"eval.fairness", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.eval_fairness = ParseBoolValue("eval.fairness", v);
       },
       [](const RunConfig& c) { return Bool(c.eval_fairness); }},
      {"eval.latency", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.eval_latency = ParseBoolValue("eval.latency", v);
       },
       [](const RunConfig& c) { return Bool(c.eval_latency); }},
      {"bench.batch_sizes", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.bench.batch_sizes = ParseSizeList("bench.batch_sizes", v);
       },
       [](const RunConfig& c) { return SizeListText(c.bench.batch_sizes); }},
      {"bench.repetitions", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.bench.repetitions = ParseUintValue("bench.repetitions", v);
       },
       [](const RunConfig& c) { return std::to_string(c.bench.repetitions); }},
      {"bench.warmup", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.bench.warmup = ParseUintValue("bench.warmup", v);
       },
       [](const RunConfig& c) { return std::to_string(c.bench.warmup); }},
      {"bench.hardware", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.bench.hardware = v;
       },
       [](const RunConfig& c) { return c.bench.hardware; }},
      {"bench.process", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.bench.include_process = ParseBoolValue("bench.process", v);
       },
       [](const RunConfig& c) { return Bool(c.bench.include_process); }},
      {"bench.decode", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.bench.include_decode = ParseBoolValue("bench.decode", v);
       },
       [](const RunConfig& c) { return Bool(c.bench.include_decode); }},
      {"output.dir", false,
       [](RunConfig& c, const std::string& v, const P& base) {
         c.out_dir = Resolve(base, v);
       },
       [](const RunConfig& c) { return c.out_dir.string(); }},
      {"compare.reports", true,
       [](RunConfig& c, const std::string& v, const P& base) {
         c.compare_reports.clear();
         for (const std::string& item : SplitList(v)) {
           c.compare_reports.push_back(Resolve(base, item));
         }
       },
       [](const RunConfig& c) { return PathListText(c.compare_reports); }},
      {"compare.configs", true,
       [](RunConfig& c, const std::string& v, const P& base) {
         c.compare_configs.clear();
         for (const std::string& item : SplitList(v)) {
           c.compare_configs.push_back(Resolve(base, item));
         }
       },
       [](const RunConfig& c) { return PathListText(c.compare_configs); }},
      {"compare.parallel", true,
       [](RunConfig& c, const std::string& v, const P&) {
         c.compare_parallel = ParseBoolValue("compare.parallel", v);
       },
       [](const RunConfig& c) { return Bool(c.compare_parallel); }},
  };
  return specs;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> RunConfig::Canonical() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const KeySpec& spec : KeySpecs()) {
    if (spec.identity) out.emplace_back(spec.key, spec.get(*this));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t RunConfig::Fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, value] : Canonical()) {
    for (char c : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::uint64_t RunConfig::run_seed() const {
  if (!seed) throw ConfigError("config: seed is mandatory");
  return *seed;
}

RunConfig ParseRunConfig(const std::string& text,
                         const std::filesystem::path& base_dir) {
  std::map<std::string, const KeySpec*> by_key;
  for (const KeySpec& spec : KeySpecs()) by_key[spec.key] = &spec;

  RunConfig config;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got '" + t + "'");
    }
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
    if (seen.count(key) != 0) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "' (first on line " +
                        std::to_string(seen[key]) + ")");
    }
    seen[key] = line_no;
    it->second->set(config, value, base_dir);
  }
  if (!config.seed) {
    throw ConfigError("config: seed is mandatory (no wall-clock default)");
  }
  config.lsp.seed = *config.seed;
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Data

namespace {

void RequireFile(const std::filesystem::path& p, const std::string& what) {
  if (p.empty()) throw ConfigError("config: " + what + " is not set");
  if (!std::filesystem::exists(p)) {
    throw DataError(what + " not found: " + p.string());
  }
}

Dataset TakeRows(const Dataset& d, std::size_t limit) {
  if (limit == 0 || limit >= d.rows()) return d;
  std::vector<std::size_t> rows(limit);
  for (std::size_t i = 0; i < limit; ++i) rows[i] = i;
  return d.Subset(rows);
}

}  // namespace

Dataset LoadRunDataset(const RunConfig& config) {
  switch (config.source) {
    case DataSource::kSynthetic: {
      SynthOptions o = config.synth;
      if (!config.synth_seed_set) o.seed = config.run_seed();
      return SynthTwoDomain(o);
    }
    case DataSource::kDelimited:
      RequireFile(config.data_path, "data.path");
      return LoadDelimited(config.data_path, config.schema);
    case DataSource::kIdx: {
      Dataset parts[2];
      for (int i = 0; i < 2; ++i) {
        const std::string suffix = i == 0 ? "a" : "b";
        RequireFile(config.idx_images[i], "data.idx.images_" + suffix);
        RequireFile(config.idx_labels[i], "data.idx.labels_" + suffix);
        parts[i] = TakeRows(LoadIdx(config.idx_images[i], config.idx_labels[i]),
                            config.idx_limit);
        parts[i].s.assign(parts[i].rows(), i);
      }
      if (parts[0].image_shape != parts[1].image_shape) {
        throw DataError("idx: the two image sets have different shapes");
      }
      Dataset d = parts[0];
      d.x = ConcatRows(parts[0].x, parts[1].x);
      d.y_util.insert(d.y_util.end(), parts[1].y_util.begin(),
                      parts[1].y_util.end());
      d.s.insert(d.s.end(), parts[1].s.begin(), parts[1].s.end());
      if (parts[1].utility_classes.size() > d.utility_classes.size()) {
        d.utility_classes = parts[1].utility_classes;
      }
      d.sensitive_classes = {"a", "b"};
      d.Validate();
      return d;
    }
  }
  throw ConfigError("config: unknown data source");
}

Split SplitForRun(const RunConfig& config, const Dataset& data) {
  return SplitNormalize(data, config.train_fraction, config.run_seed());
}

std::vector<KvRecord> HistoryRecords(const RunConfig& config,
                                     std::uint64_t dataset_fingerprint,
                                     const std::vector<EpochStats>& history) {
  std::vector<KvRecord> out;
  out.push_back(KvRecord("history_meta")
                    .Add("experiment", config.experiment)
                    .Add("seed", config.run_seed())
                    .Add("config_fingerprint",
                         HexFingerprint(config.Fingerprint()))
                    .Add("dataset_fingerprint",
                         HexFingerprint(dataset_fingerprint))
                    .Add("epochs", static_cast<std::uint64_t>(history.size())));
  for (const EpochStats& e : history) {
    out.push_back(KvRecord("epoch")
                      .Add("epoch", e.epoch)
                      .Add("recon_loss", e.recon_loss)
                      .Add("disc_loss", e.disc_loss)
                      .Add("sens_loss", e.sens_loss)
                      .Add("disc_train_accuracy", e.disc_train_accuracy));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Tensor ReleaseFeatures(const RunConfig& config, const Tensor& x,
                       const LspModel* model) {
  switch (config.method) {
    case Method::kRaw:
      return x;
    case Method::kLsp:
      if (model == nullptr) {
        throw ContractError("release: method lsp requires a trained model");
      }
      return model->Encode(x).z_ns;
    case Method::kDp:
      return DpPerturb(x, config.dp, config.run_seed());
    case Method::kKAnonymity: {
      std::vector<std::size_t> qids = config.quasi_ids;
      if (qids.empty()) {
        for (std::size_t j = 0; j < x.cols(); ++j) qids.push_back(j);
      }
      const std::vector<ColumnKind> kinds(x.cols(), ColumnKind::kNumeric);
      return KAnonymize(x, kinds, qids, config.k).values;
    }
  }
  throw ConfigError("release: unknown method");
}

namespace {

std::vector<std::size_t> Range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> out;
  for (std::size_t i = begin; i < end; ++i) out.push_back(i);
  return out;
}

FidelityMetrics ComputeFidelity(const Tensor& original,
                                const Tensor& reconstruction,
                                const ImageShape& shape) {
  FidelityMetrics f;
  f.mse = MeanSquaredError(original, reconstruction);
  f.psnr_db = f.mse == 0.0 ? kPsnrInfinite : 10.0 * std::log10(1.0 / f.mse);
  double ssim = 0.0;
  for (std::size_t i = 0; i < original.rows(); ++i) {
    const Tensor a({shape.height, shape.width},
                   std::vector<double>(original.row(i).begin(),
                                       original.row(i).end()));
    const Tensor b({shape.height, shape.width},
                   std::vector<double>(reconstruction.row(i).begin(),
                                       reconstruction.row(i).end()));
    ssim += Ssim(a, b);
  }
  f.ssim = ssim / static_cast<double>(original.rows());
  return f;
}

}  // namespace

MetricsReport EvaluateRun(const RunConfig& config, const Dataset& data,
                          const LspModel* model) {
  const std::uint64_t seed = config.run_seed();
  config.classifier.Validate();
  if (config.method == Method::kLsp) {
    if (model == nullptr) {
      throw ConfigError("eval: method lsp requires a model (--model)");
    }
    if (model->dims().input_dim != data.cols()) {
      throw DataError("eval: model expects " +
                      std::to_string(model->dims().input_dim) +
                      " features, dataset has " + std::to_string(data.cols()));
    }
  }
  if (config.eval_latency && config.method != Method::kLsp) {
    throw ConfigError("eval.latency applies to method lsp only");
  }
  const Split split = SplitForRun(config, data);
  const std::size_t n_train = split.train.rows();
  const std::size_t n_all = n_train + split.test.rows();

  MetricsReport report;
  report.experiment = config.experiment;
  report.method = MethodName(config.method);
  report.seed = seed;
  report.config_fingerprint = config.Fingerprint();
  report.dataset_fingerprint = Fingerprint(data);
  report.n_train = n_train;
  report.n_test = split.test.rows();

  const Tensor x_all = ConcatRows(split.train.x, split.test.x);
  std::vector<int> s_all = split.train.s;
  s_all.insert(s_all.end(), split.test.s.begin(), split.test.s.end());
  const Tensor released = ReleaseFeatures(config, x_all, model);
  const Tensor rel_train = SliceRows(released, Range(0, n_train));
  const Tensor rel_test = SliceRows(released, Range(n_train, n_all));

  // Downstream utility.
  const std::size_t n_util = data.n_utility_classes();
  const MlpClassifier downstream = MlpClassifier::Fit(
      rel_train, split.train.y_util, n_util, config.classifier,
      DeriveSeed(seed, SeedComponent::kDownstream));
  const Tensor proba = downstream.PredictProba(rel_test);
  const std::vector<int> y_hat = ArgmaxRows(proba);
  if (n_util == 2) {
    std::vector<double> scores(proba.rows());
    for (std::size_t i = 0; i < proba.rows(); ++i) scores[i] = proba(i, 1);
    const ClassificationMetrics m =
        ComputeClassificationMetrics(split.test.y_util, scores);
    report.utility.accuracy = m.accuracy;
    report.utility.f1 = m.f1;
    report.utility.auc_roc = m.auc_roc;
    report.utility.avg_precision = m.avg_precision;
  } else {
    report.utility.accuracy = downstream.Accuracy(rel_test, split.test.y_util);
  }

  // Attribute inference on raw and released features.
  const AttackResult raw_attack =
      TrainAttacker(x_all, s_all, config.classifier, seed);
  report.attacker_accuracy_raw = raw_attack.test_accuracy;
  report.attacker_chance = raw_attack.chance;
  report.attacker_accuracy_obf =
      config.method == Method::kRaw
          ? raw_attack.test_accuracy
          : TrainAttacker(released, s_all, config.classifier, seed)
                .test_accuracy;
  report.privacy_protection =
      PrivacyProtection(report.attacker_accuracy_raw,
                        report.attacker_accuracy_obf, report.attacker_chance);

  if (config.eval_fidelity) {
    if (!data.image_shape) {
      throw ConfigError("eval.fidelity requires image-shaped data");
    }
    Tensor recon;
    switch (config.method) {
      case Method::kLsp:
        recon = model->Decode(model->Encode(split.test.x));
        break;
      case Method::kRaw:
        recon = split.test.x;
        break;
      default:
        recon = rel_test;
    }
    report.fidelity = ComputeFidelity(split.test.x, recon, *data.image_shape);
  }

  if (config.eval_fairness) {
    if (n_util != 2 || data.n_sensitive_classes() != 2) {
      throw ConfigError(
          "eval.fairness requires binary utility and sensitive labels");
    }
    const FairnessMetrics f =
        ComputeFairness(y_hat, split.test.y_util, split.test.s);
    report.fairness =
        FairnessReport{f.demographic_parity_diff, f.equal_opportunity_diff};
  }

  if (config.eval_latency) {
    const BenchOutput bench = BenchRun(config, *model);
    for (const LatencyRow& row : bench.latency.rows) {
      report.latency.push_back(LatencyEntry{row.stage, row.batch_size,
                                            row.mean_ms, row.stddev_ms,
                                            row.samples_ms.size()});
    }
  }
  return report;
}

BenchOutput BenchRun(const RunConfig& config, const LspModel& model) {
  BenchOutput out;
  out.latency = RunLatencyBench(model, nullptr, config.bench, config.run_seed());
  const LatencyReport& l = out.latency;
  out.records.push_back(
      KvRecord("bench_meta")
          .Add("experiment", config.experiment)
          .Add("seed", config.run_seed())
          .Add("config_fingerprint", HexFingerprint(config.Fingerprint()))
          .Add("header", l.header)
          .Add("hardware", l.hardware.empty() ? "unspecified" : l.hardware)
          .Add("process_model", "untrained downstream classifier")
          .Add("repetitions",
               static_cast<std::uint64_t>(config.bench.repetitions))
          .Add("warmup", static_cast<std::uint64_t>(config.bench.warmup))
          .Add("timer_resolution_ms", l.timer_resolution_ms));
  for (const LatencyRow& row : l.rows) {
    out.records.push_back(
        KvRecord("latency")
            .Add("stage", row.stage)
            .Add("batch_size", static_cast<std::uint64_t>(row.batch_size))
            .Add("mean_ms", row.mean_ms)
            .Add("stddev_ms", row.stddev_ms)
            .Add("n", static_cast<std::uint64_t>(row.samples_ms.size())));
  }
  out.records.push_back(
      KvRecord("fit").Add("encode_linear_r2", l.encode_linear_r2));
  for (const std::string& w : l.warnings) {
    out.records.push_back(KvRecord("warning").Add("message", w));
  }

  std::ostringstream os;
  os << l.header << "\n"
     << "hardware: " << (l.hardware.empty() ? "unspecified" : l.hardware)
     << "\n"
     << "process stage: untrained downstream classifier of the fixed "
        "architecture\n"
     << "seed " << config.run_seed() << ", config "
     << HexFingerprint(config.Fingerprint()) << "\n\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %10s %12s %12s %4s\n", "stage",
                "batch", "mean_ms", "stddev_ms", "n");
  os << line;
  for (const LatencyRow& row : l.rows) {
    std::snprintf(line, sizeof(line), "%-8s %10zu %12.4f %12.4f %4zu\n",
                  row.stage.c_str(), row.batch_size, row.mean_ms,
                  row.stddev_ms, row.samples_ms.size());
    os << line;
  }
  os << "\nencode linear fit R^2: " << FormatDouble(l.encode_linear_r2)
     << "\n";
  for (const std::string& w : l.warnings) os << "warning: " << w << "\n";
  out.text = os.str();
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

void EnsureDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " +
                  ec.message());
  }
}

LspModel LoadModelFor(const std::filesystem::path& model_path,
                      const std::filesystem::path& out_dir) {
  const std::filesystem::path p =
      model_path.empty() ? out_dir / "model.lspm" : model_path;
  if (!std::filesystem::exists(p)) {
    throw DataError("model file not found: " + p.string());
  }
  return LoadModel(p);
}

TrainResult TrainOnSplit(const RunConfig& config, const Split& split,
                         const std::filesystem::path& checkpoint_dir) {
  TrainConfig tc = config.lsp;
  tc.seed = config.run_seed();
  return Train(split.train, tc, checkpoint_dir);
}

}  // namespace

void CmdTrain(const RunConfig& config, const std::filesystem::path& out_dir) {
  if (config.method != Method::kLsp) {
    throw ConfigError(std::string("train: method must be lsp, got ") +
                      MethodName(config.method));
  }
  config.lsp.Validate();
  const Dataset data = LoadRunDataset(config);
  const Split split = SplitForRun(config, data);
  EnsureDir(out_dir);
  const TrainResult result = TrainOnSplit(config, split, out_dir);
  SaveModel(result.model, out_dir / "model.lspm");
  WriteKvFile(out_dir / "history.kv",
              HistoryRecords(config, Fingerprint(data), result.history));
}

MetricsReport CmdEval(const RunConfig& config,
                      const std::filesystem::path& model_path,
                      const std::filesystem::path& out_dir) {
  const Dataset data = LoadRunDataset(config);
  std::optional<LspModel> model;
  if (config.method == Method::kLsp) {
    model = LoadModelFor(model_path, out_dir);
  }
  const MetricsReport report =
      EvaluateRun(config, data, model ? &*model : nullptr);
  EnsureDir(out_dir);
  WriteKvFile(out_dir / "report.kv", report.ToRecords());
  WriteTextFile(out_dir / "report.txt", report.ToText());
  return report;
}

std::vector<MetricsReport> CmdCompare(const RunConfig& config,
                                      const std::filesystem::path& out_dir) {
  if (!config.compare_reports.empty() && !config.compare_configs.empty()) {
    throw ConfigError(
        "compare: set either compare.reports or compare.configs, not both");
  }
  std::vector<MetricsReport> reports;
  if (!config.compare_reports.empty()) {
    for (const auto& p : config.compare_reports) {
      if (!std::filesystem::exists(p)) {
        throw DataError("report not found: " + p.string());
      }
      reports.push_back(MetricsReport::FromRecords(ReadKvFile(p)));
    }
  } else {
    std::vector<RunConfig> runs;
    for (const auto& p : config.compare_configs) {
      runs.push_back(LoadRunConfig(p));
    }
    if (runs.size() < 2) {
      throw ConfigError("compare: needs at least two reports or configs");
    }
    auto run_one = [](const RunConfig& rc) {
      const Dataset data = LoadRunDataset(rc);
      if (rc.method != Method::kLsp) return EvaluateRun(rc, data, nullptr);
      const Split split = SplitForRun(rc, data);
      const TrainResult trained = TrainOnSplit(rc, split, {});
      return EvaluateRun(rc, data, &trained.model);
    };
    if (config.compare_parallel) {
      std::vector<std::future<MetricsReport>> futures;
      for (const RunConfig& rc : runs) {
        futures.push_back(std::async(std::launch::async, run_one, rc));
      }
      for (auto& f : futures) reports.push_back(f.get());
    } else {
      for (const RunConfig& rc : runs) reports.push_back(run_one(rc));
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const std::filesystem::path dir =
          out_dir / "runs" / (std::to_string(i) + "_" + reports[i].experiment);
      EnsureDir(dir);
      WriteKvFile(dir / "report.kv", reports[i].ToRecords());
      WriteTextFile(dir / "report.txt", reports[i].ToText());
    }
  }
  CheckComparable(reports);
  EnsureDir(out_dir);
  std::vector<KvRecord> records = CompareRecords(reports);
  records.front().Add("config_fingerprint",
                      HexFingerprint(config.Fingerprint()));
  WriteKvFile(out_dir / "compare.kv", records);
  WriteTextFile(out_dir / "compare.txt", CompareText(reports));
  return reports;
}

BenchOutput CmdBench(const RunConfig& config,
                     const std::filesystem::path& model_path,
                     const std::filesystem::path& out_dir) {
  const LspModel model = LoadModelFor(model_path, out_dir);
  BenchOutput out = BenchRun(config, model);
  EnsureDir(out_dir);
  WriteKvFile(out_dir / "bench.kv", out.records);
  WriteTextFile(out_dir / "bench.txt", out.text);
  return out;
}

}  // namespace lsp
