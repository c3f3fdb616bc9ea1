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

#include "lsp/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "lsp/error.h"
#include "lsp/random.h"

namespace lsp {

std::size_t Dataset::n_utility_classes() const {
  std::size_t n = utility_classes.size();
  for (int y : y_util) n = std::max(n, static_cast<std::size_t>(y) + 1);
  return n;
}

std::size_t Dataset::n_sensitive_classes() const {
  std::size_t n = sensitive_classes.size();
  for (int v : s) n = std::max(n, static_cast<std::size_t>(v) + 1);
  return n;
}

void Dataset::Validate() const {
  const std::size_t n = rows();
  if (y_util.size() != n || s.size() != n) {
    throw DataError("dataset row counts disagree: X has " + std::to_string(n) +
                    ", y_util " + std::to_string(y_util.size()) + ", s " +
                    std::to_string(s.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (y_util[i] < 0 || s[i] < 0) {
      throw DataError("negative label at row " + std::to_string(i));
    }
  }
}

Dataset Dataset::Subset(const std::vector<std::size_t>& rows) const {
  Dataset out = *this;
  out.x = SliceRows(x, rows);
  out.y_util.clear();
  out.s.clear();
  for (std::size_t r : rows) {
    out.y_util.push_back(y_util.at(r));
    out.s.push_back(s.empty() ? 0 : s.at(r));
  }
  return out;
}

namespace {

class Fnv1a {
 public:
  void Add(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001B3ULL;
    }
  }
  template <typename T>
  void AddValue(T v) {
    Add(&v, sizeof(v));
  }
  std::uint64_t hash() const { return h_; }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

}  // namespace

std::uint64_t Fingerprint(const Dataset& d) {
  Fnv1a h;
  h.AddValue<std::uint64_t>(d.rows());
  h.AddValue<std::uint64_t>(d.cols());
  for (double v : d.x.values()) h.AddValue(v);
  for (int v : d.y_util) h.AddValue<std::int32_t>(v);
  for (int v : d.s) h.AddValue<std::int32_t>(v);
  return h.hash();
}

// ---------------------------------------------------------------------------
// Delimited text

namespace {

std::vector<std::string> SplitLine(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::optional<double> ParseNumber(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) return std::nullopt;
  return v;
}

std::string FormatNumber(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::size_t ResolveColumn(const ColumnRef& ref,
                          const std::vector<std::string>& names, bool header) {
  if (const auto* idx = std::get_if<std::size_t>(&ref)) {
    if (*idx >= names.size()) {
      throw ConfigError("schema: column index " + std::to_string(*idx) +
                        " out of range (" + std::to_string(names.size()) +
                        " columns)");
    }
    return *idx;
  }
  const std::string& name = std::get<std::string>(ref);
  if (!header) {
    throw ConfigError("schema: column '" + name +
                      "' referenced by name but the file has no header");
  }
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw ConfigError("schema: unknown column '" + name + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

// Integer codes in first-appearance order.
std::vector<int> EncodeLabels(const std::vector<std::string>& values,
                              std::vector<std::string>& classes) {
  std::unordered_map<std::string, int> codes;
  std::vector<int> out;
  out.reserve(values.size());
  for (const std::string& v : values) {
    auto [it, inserted] =
        codes.emplace(v, static_cast<int>(classes.size()));
    if (inserted) classes.push_back(v);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

Dataset LoadDelimited(const std::filesystem::path& path,
                      const DelimitedSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::size_t first_data = 0;
  std::vector<std::string> names;
  if (schema.header) {
    if (lines.empty()) throw DataError("'" + path.string() + "' is empty");
    names = SplitLine(lines[0], schema.delimiter);
    first_data = 1;
  }
  if (lines.size() <= first_data) {
    throw DataError("'" + path.string() + "' has no data rows");
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    rows.push_back(SplitLine(lines[i], schema.delimiter));
  }
  if (!schema.header) {
    for (std::size_t j = 0; j < rows[0].size(); ++j) {
      names.push_back("column_" + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != names.size()) {
      throw DataError(path.string() + ":" + std::to_string(i + first_data + 1) +
                      ": expected " + std::to_string(names.size()) +
                      " fields, got " + std::to_string(rows[i].size()));
    }
  }

  const std::size_t util_col =
      ResolveColumn(schema.utility_column, names, schema.header);
  const std::size_t sens_col =
      ResolveColumn(schema.sensitive_column, names, schema.header);
  if (util_col == sens_col) {
    throw ConfigError("schema: utility and sensitive columns coincide");
  }
  std::vector<std::size_t> feature_cols;
  if (schema.feature_columns.empty()) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j != util_col && j != sens_col) feature_cols.push_back(j);
    }
  } else {
    for (const ColumnRef& ref : schema.feature_columns) {
      feature_cols.push_back(ResolveColumn(ref, names, schema.header));
    }
  }
  if (feature_cols.empty()) throw ConfigError("schema: no feature columns");
  std::vector<std::size_t> forced;
  for (const ColumnRef& ref : schema.categorical_columns) {
    forced.push_back(ResolveColumn(ref, names, schema.header));
  }

  Dataset d;
  d.utility_name = names[util_col];
  d.sensitive_name = names[sens_col];
  const std::size_t n = rows.size();
  std::vector<std::vector<double>> columns;  // expanded X columns
  for (std::size_t c : feature_cols) {
    ColumnMeta meta;
    meta.name = names[c];
    std::vector<double> numeric;
    bool is_numeric =
        std::find(forced.begin(), forced.end(), c) == forced.end();
    for (std::size_t i = 0; is_numeric && i < n; ++i) {
      const auto v = ParseNumber(rows[i][c]);
      if (!v) {
        is_numeric = false;
      } else {
        numeric.push_back(*v);
      }
    }
    if (is_numeric) {
      meta.kind = ColumnKind::kNumeric;
      meta.min = *std::min_element(numeric.begin(), numeric.end());
      meta.max = *std::max_element(numeric.begin(), numeric.end());
      columns.push_back(std::move(numeric));
    } else {
      meta.kind = ColumnKind::kCategorical;
      std::vector<std::string> values;
      for (std::size_t i = 0; i < n; ++i) values.push_back(rows[i][c]);
      const std::vector<int> codes = EncodeLabels(values, meta.categories);
      for (std::size_t k = 0; k < meta.categories.size(); ++k) {
        std::vector<double> onehot(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          onehot[i] = codes[i] == static_cast<int>(k) ? 1.0 : 0.0;
        }
        columns.push_back(std::move(onehot));
      }
      meta.min = 0.0;
      meta.max = 1.0;
    }
    d.columns.push_back(std::move(meta));
  }
  d.x = Tensor({n, columns.size()});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) d.x(i, j) = columns[j][i];
  }
  std::vector<std::string> util_values, sens_values;
  for (const auto& row : rows) {
    util_values.push_back(row[util_col]);
    sens_values.push_back(row[sens_col]);
  }
  d.y_util = EncodeLabels(util_values, d.utility_classes);
  d.s = EncodeLabels(sens_values, d.sensitive_classes);
  return d;
}

void WriteDelimited(const Dataset& d, const std::filesystem::path& path,
                    char delimiter) {
  d.Validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const ColumnMeta& c : d.columns) out << c.name << delimiter;
  out << d.utility_name << delimiter << d.sensitive_name << '\n';
  auto label = [](const std::vector<std::string>& classes, int code) {
    return static_cast<std::size_t>(code) < classes.size()
               ? classes[static_cast<std::size_t>(code)]
               : std::to_string(code);
  };
  for (std::size_t i = 0; i < d.rows(); ++i) {
    std::size_t j = 0;
    for (const ColumnMeta& c : d.columns) {
      if (c.kind == ColumnKind::kNumeric) {
        out << FormatNumber(d.x(i, j));
      } else {
        std::size_t hot = 0;
        for (std::size_t k = 0; k < c.categories.size(); ++k) {
          if (d.x(i, j + k) > 0.5) hot = k;
        }
        out << c.categories[hot];
      }
      j += c.width();
      out << delimiter;
    }
    out << label(d.utility_classes, d.y_util[i]) << delimiter
        << label(d.sensitive_classes, d.s[i]) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// IDX

namespace {

std::vector<unsigned char> ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

std::uint32_t ReadBigEndian32(const std::vector<unsigned char>& bytes,
                              std::size_t offset,
                              const std::filesystem::path& path) {
  if (bytes.size() < offset + 4) {
    throw FormatError("'" + path.string() + "': truncated header at offset " +
                      std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

void CheckMagic(std::uint32_t got, std::uint32_t want,
                const std::filesystem::path& path) {
  if (got != want) {
    std::ostringstream os;
    os << "'" << path.string() << "': bad IDX magic at offset 0: got 0x"
       << std::hex << got << ", expected 0x" << want;
    throw FormatError(os.str());
  }
}

}  // namespace

Dataset LoadIdx(const std::filesystem::path& images,
                const std::filesystem::path& labels) {
  const std::vector<unsigned char> img = ReadAll(images);
  const std::vector<unsigned char> lab = ReadAll(labels);
  CheckMagic(ReadBigEndian32(img, 0, images), kIdxImageMagic, images);
  CheckMagic(ReadBigEndian32(lab, 0, labels), kIdxLabelMagic, labels);
  const std::size_t n = ReadBigEndian32(img, 4, images);
  const std::size_t h = ReadBigEndian32(img, 8, images);
  const std::size_t w = ReadBigEndian32(img, 12, images);
  const std::size_t n_labels = ReadBigEndian32(lab, 4, labels);
  if (n == 0) throw DataError("'" + images.string() + "' holds zero images");
  if (h == 0 || w == 0) {
    throw FormatError("'" + images.string() + "': zero image dimension");
  }
  if (n != n_labels) {
    throw DataError("IDX count mismatch: " + std::to_string(n) +
                    " images vs " + std::to_string(n_labels) + " labels");
  }
  const std::size_t pixels = h * w;
  if (img.size() != 16 + n * pixels) {
    throw FormatError("'" + images.string() + "': expected " +
                      std::to_string(16 + n * pixels) + " bytes, got " +
                      std::to_string(img.size()));
  }
  if (lab.size() != 8 + n) {
    throw FormatError("'" + labels.string() + "': expected " +
                      std::to_string(8 + n) + " bytes, got " +
                      std::to_string(lab.size()));
  }
  Dataset d;
  d.x = Tensor({n, pixels});
  auto xv = d.x.mutable_values();
  for (std::size_t i = 0; i < n * pixels; ++i) {
    xv[i] = static_cast<double>(img[16 + i]) / 255.0;
  }
  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d.y_util.push_back(lab[8 + i]);
    max_label = std::max<int>(max_label, lab[8 + i]);
  }
  d.s.assign(n, 0);
  for (int k = 0; k <= max_label; ++k) {
    d.utility_classes.push_back(std::to_string(k));
  }
  for (std::size_t p = 0; p < pixels; ++p) {
    ColumnMeta meta;
    meta.name = "px" + std::to_string(p);
    meta.min = 0.0;
    meta.max = 1.0;
    d.columns.push_back(std::move(meta));
  }
  d.utility_name = "digit";
  d.sensitive_name = "origin";
  d.image_shape = ImageShape{h, w};
  return d;
}

// ---------------------------------------------------------------------------
// Synthetic two-domain moons

namespace {

// Geometry constants. The mixing weights come from a fixed seed so that the
// feature map is identical for every dataset seed.
// Domain 1 adds a fixed shift of this norm along a fixed
// direction in feature space.
constexpr double kDomainShiftNorm = 1.2;
constexpr double kDomainNoise[2] = {0.05, 0.08};
constexpr std::size_t kStyleFactors = 3;
constexpr std::uint64_t kGeometrySeed = 0x4C53504D4F4F4E53ULL;

}  // namespace

Dataset SynthTwoDomain(const SynthOptions& o) {
  if (o.n_per_class < 10) {
    throw ConfigError("synth_two_domain: n_per_class must be >= 10");
  }
  if (o.informative_features < 2) {
    throw ConfigError("synth_two_domain: need >= 2 informative features");
  }
  const std::size_t n = 2 * o.n_per_class;
  const std::size_t d = o.informative_features + o.nuisance_features;

  // Feature map: x_j = tanh(a_j . [u, v, style...] + c_j) + domain * h_j.
  Rng geo(kGeometrySeed);
  const std::size_t inputs = 2 + kStyleFactors;
  std::vector<double> mix(o.informative_features * inputs);
  std::vector<double> offset(o.informative_features);
  for (std::size_t j = 0; j < o.informative_features; ++j) {
    for (std::size_t k = 0; k < inputs; ++k) {
      const double range = k < 2 ? 0.8 : 0.4;
      mix[j * inputs + k] = (2.0 * UniformUnit(geo) - 1.0) * range;
    }
    offset[j] = UniformUnit(geo) - 0.5;
  }
  std::vector<double> shift(o.informative_features);
  double shift_sq = 0.0;
  for (double& v : shift) {
    v = StandardNormal(geo);
    shift_sq += v * v;
  }
  for (double& v : shift) v *= kDomainShiftNorm / std::sqrt(shift_sq);

  Rng rng = MakeRng(o.seed, SeedComponent::kSynthetic);
  Dataset ds;
  ds.x = Tensor({n, d});
  ds.y_util.resize(n);
  ds.s.resize(n);
  std::vector<double> latent(inputs);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    const int domain = static_cast<int>((i / 2) % 2);
    const double t = std::numbers::pi * UniformUnit(rng);
    double u = cls == 0 ? std::cos(t) : 1.0 - std::cos(t);
    double v = cls == 0 ? std::sin(t) : 0.5 - std::sin(t);
    u += kDomainNoise[domain] * StandardNormal(rng);
    v += kDomainNoise[domain] * StandardNormal(rng);
    latent[0] = u;
    latent[1] = v;
    for (std::size_t k = 0; k < kStyleFactors; ++k) {
      latent[2 + k] = 2.0 * UniformUnit(rng) - 1.0;
    }
    for (std::size_t j = 0; j < o.informative_features; ++j) {
      double a = offset[j];
      for (std::size_t k = 0; k < inputs; ++k) {
        a += mix[j * inputs + k] * latent[k];
      }
      ds.x(i, j) = std::tanh(a) + (domain == 1 ? shift[j] : 0.0);
    }
    for (std::size_t j = o.informative_features; j < d; ++j) {
      ds.x(i, j) = UniformUnit(rng);
    }
    ds.y_util[i] = cls;
    ds.s[i] = domain;
  }
  for (std::size_t j = 0; j < d; ++j) {
    ColumnMeta meta;
    meta.name = (j < o.informative_features ? "f" : "noise") +
                std::to_string(j);
    double lo = ds.x(0, j), hi = ds.x(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, ds.x(i, j));
      hi = std::max(hi, ds.x(i, j));
    }
    meta.min = lo;
    meta.max = hi;
    ds.columns.push_back(std::move(meta));
  }
  ds.utility_name = "moon";
  ds.sensitive_name = "domain";
  ds.utility_classes = {"0", "1"};
  ds.sensitive_classes = {"0", "1"};
  return ds;
}

// ---------------------------------------------------------------------------
// Split + normalization

NormalizationStats NormalizationStats::Fit(const Tensor& x) {
  if (x.rank() != 2 || x.rows() == 0) {
    throw DataError("normalization: need a non-empty matrix");
  }
  NormalizationStats st;
  st.min.assign(x.cols(), 0.0);
  st.max.assign(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t i = 1; i < x.rows(); ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    st.min[j] = lo;
    st.max[j] = hi;
  }
  return st;
}

Tensor NormalizationStats::Apply(const Tensor& x) const {
  if (x.rank() != 2 || x.cols() != min.size()) {
    throw ShapeError("normalization: input " + ShapeToString(x.shape()) +
                     " vs " + std::to_string(min.size()) + " fitted columns");
  }
  Tensor out = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double range = max[j] - min[j];
      out(i, j) = range > 0.0 ? (x(i, j) - min[j]) / range : x(i, j) - min[j];
    }
  }
  return out;
}

Split SplitNormalize(const Dataset& d, double train_fraction,
                     std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  d.Validate();
  std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    strata[{d.y_util[i], d.s[i]}].push_back(i);
  }
  Rng rng = MakeRng(seed, SeedComponent::kSplit);
  Split out;
  for (auto& [key, rows] : strata) {
    if (rows.size() < 2) {
      throw DataError("stratification: stratum (y_util=" +
                      std::to_string(key.first) +
                      ", s=" + std::to_string(key.second) + ") has " +
                      std::to_string(rows.size()) + " row(s), needs >= 2");
    }
    FisherYatesShuffle(std::span<std::size_t>(rows), rng);
    const double want = std::round(train_fraction * rows.size());
    const std::size_t n_train = std::clamp<std::size_t>(
        static_cast<std::size_t>(want), 1, rows.size() - 1);
    out.train_rows.insert(out.train_rows.end(), rows.begin(),
                          rows.begin() + n_train);
    out.test_rows.insert(out.test_rows.end(), rows.begin() + n_train,
                         rows.end());
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = d.Subset(out.train_rows);
  out.test = d.Subset(out.test_rows);
  out.stats = NormalizationStats::Fit(out.train.x);
  out.train.x = out.stats.Apply(out.train.x);
  out.test.x = out.stats.Apply(out.test.x);
  return out;
}

}  // namespace lsp
