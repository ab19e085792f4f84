#include "gsvma/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace gsvma::dataset {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

bool parse_number(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string record_pos(std::size_t record) {
  // header is line 1, so record r sits on line r+2
  return "record " + std::to_string(record) + " (line " + std::to_string(record + 2) + ")";
}

}  // namespace

MissingValue::MissingValue(std::size_t record_, std::string column_)
    : Error(record_pos(record_) + ", column '" + column_ + "': missing value"),
      record(record_),
      column(std::move(column_)) {}

IllegalNominalValue::IllegalNominalValue(std::size_t record_, std::string column_, std::string value_)
    : Error(record_pos(record_) + ", column '" + column_ + "': value '" + value_ +
            "' is not in the allowed set"),
      record(record_),
      column(std::move(column_)),
      value(std::move(value_)) {}

NonNumericCell::NonNumericCell(std::size_t record_, std::string column_, std::string text_)
    : Error(record_pos(record_) + ", column '" + column_ + "': '" + text_ + "' is not a number"),
      record(record_),
      column(std::move(column_)),
      text(std::move(text_)) {}

const FeatureSpec* RawSchema::find(const std::string& name) const {
  for (const auto& f : features)
    if (f.name == name) return &f;
  return nullptr;
}

std::vector<std::string> EncodedDataset::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (const auto& c : columns) names.push_back(c.name());
  return names;
}

std::vector<std::size_t> FoldPlan::fold_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldPlan::complement_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) rows.push_back(i);
  return rows;
}

RawSchema load_schema(std::istream& in) {
  RawSchema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;

    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("schema line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));

    if (key == "target") {
      schema.target = value;
    } else if (key == "positive") {
      schema.positive_label = value;
    } else if (key == "negative") {
      schema.negative_label = value;
    } else if (key.starts_with("feature.")) {
      FeatureSpec f;
      f.name = trim(key.substr(8));
      if (f.name.empty())
        throw InvalidConfig("schema line " + std::to_string(line_no) + ": empty feature name");
      if (value == "numeric") {
        f.kind = FeatureKind::Numeric;
      } else if (value.starts_with("binary(") && value.ends_with(")")) {
        f.kind = FeatureKind::BinaryNominal;
        f.values = split(value.substr(7, value.size() - 8), ',');
        if (f.values.size() != 2)
          throw InvalidConfig("schema feature '" + f.name + "': binary needs exactly 2 values");
      } else if (value.starts_with("multi(") && value.ends_with(")")) {
        f.kind = FeatureKind::MultiNominal;
        f.values = split(value.substr(6, value.size() - 7), ',');
        if (f.values.size() < 2)
          throw InvalidConfig("schema feature '" + f.name + "': multi needs at least 2 values");
      } else {
        throw InvalidConfig("schema feature '" + f.name + "': unknown kind '" + value + "'");
      }
      if (schema.find(f.name)) throw InvalidConfig("schema feature '" + f.name + "' declared twice");
      schema.features.push_back(std::move(f));
    } else {
      throw InvalidConfig("schema line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (schema.features.empty()) throw InvalidConfig("schema declares no features");
  if (schema.target.empty()) throw InvalidConfig("schema declares no target column");
  if (schema.positive_label.empty() || schema.negative_label.empty())
    throw InvalidConfig("schema must declare positive and negative labels");
  if (schema.positive_label == schema.negative_label)
    throw InvalidConfig("positive and negative labels must differ");
  if (schema.find(schema.target))
    throw InvalidConfig("target column '" + schema.target + "' is also declared as a feature");
  return schema;
}

RawSchema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open schema file: " + path);
  return load_schema(in);
}

RawDataset parse_csv(std::istream& in, const RawSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw MissingColumn("empty input: no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);  // UTF-8 BOM

  const std::vector<std::string> header = split(line, ',');

  // header position of every schema feature plus the target
  std::vector<std::size_t> feature_pos(schema.features.size());
  std::size_t target_pos = header.size();
  std::vector<bool> claimed(header.size(), false);

  auto locate = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        if (claimed[i]) throw UnknownColumn("duplicate column in header: '" + name + "'");
        claimed[i] = true;
        return i;
      }
    }
    throw MissingColumn("column '" + name + "' required by the schema is missing from the header");
  };

  for (std::size_t f = 0; f < schema.features.size(); ++f) feature_pos[f] = locate(schema.features[f].name);
  target_pos = locate(schema.target);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (claimed[i]) continue;
    if (schema.find(header[i]) || header[i] == schema.target)
      throw UnknownColumn("duplicate column in header: '" + header[i] + "'");
    throw UnknownColumn("column '" + header[i] + "' is not declared in the schema");
  }

  RawDataset raw;
  raw.schema = schema;

  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;  // ignore blank lines
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() < header.size()) throw MissingValue(record, header[cells.size()]);
    if (cells.size() > header.size())
      throw Error(record_pos(record) + ": expected " + std::to_string(header.size()) +
                  " fields, found " + std::to_string(cells.size()));

    std::vector<RawCell> row;
    row.reserve(schema.features.size());
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
      const FeatureSpec& spec = schema.features[f];
      const std::string& cell = cells[feature_pos[f]];
      if (cell.empty()) throw MissingValue(record, spec.name);
      if (spec.kind == FeatureKind::Numeric) {
        double v = 0.0;
        if (!parse_number(cell, v)) throw NonNumericCell(record, spec.name, cell);
        row.emplace_back(v);
      } else {
        if (std::find(spec.values.begin(), spec.values.end(), cell) == spec.values.end())
          throw IllegalNominalValue(record, spec.name, cell);
        row.emplace_back(cell);
      }
    }

    const std::string& target = cells[target_pos];
    if (target.empty()) throw MissingValue(record, schema.target);
    if (target != schema.positive_label && target != schema.negative_label)
      throw IllegalNominalValue(record, schema.target, target);

    raw.records.push_back(std::move(row));
    raw.targets.push_back(target);
    ++record;
  }
  return raw;
}

RawDataset parse_csv_file(const std::string& path, const RawSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open dataset file: " + path);
  return parse_csv(in, schema);
}

EncodedDataset encode(const RawDataset& raw) {
  EncodedDataset out;
  for (const auto& f : raw.schema.features) {
    if (f.kind == FeatureKind::MultiNominal) {
      for (const auto& v : f.values) out.columns.push_back({f.name, v});
    } else {
      out.columns.push_back({f.name, std::nullopt});
    }
  }

  out.x = Matrix(raw.records.size(), out.columns.size());
  for (std::size_t r = 0; r < raw.records.size(); ++r) {
    std::size_t col = 0;
    for (std::size_t f = 0; f < raw.schema.features.size(); ++f) {
      const FeatureSpec& spec = raw.schema.features[f];
      const RawCell& cell = raw.records[r][f];
      switch (spec.kind) {
        case FeatureKind::Numeric:
          out.x(r, col++) = std::get<double>(cell);
          break;
        case FeatureKind::BinaryNominal:
          out.x(r, col++) = (std::get<std::string>(cell) == spec.values[1]) ? 1.0 : 0.0;
          break;
        case FeatureKind::MultiNominal: {
          const std::string& v = std::get<std::string>(cell);
          for (const auto& allowed : spec.values) out.x(r, col++) = (v == allowed) ? 1.0 : 0.0;
          break;
        }
      }
    }
  }

  out.labels.reserve(raw.targets.size());
  for (const auto& t : raw.targets) out.labels.push_back(t == raw.schema.positive_label ? +1 : -1);
  return out;
}

EncodedDataset normalize(const EncodedDataset& data, NormalizePolicy policy,
                         std::span<const std::size_t> fit_rows) {
  std::vector<std::size_t> all;
  std::span<const std::size_t> fit = fit_rows;
  if (policy == NormalizePolicy::Global) {
    all.resize(data.n_samples());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    fit = all;
  } else if (fit.empty()) {
    throw EmptyFitSet("normalize(PerFoldFit): fit row set is empty");
  } else {
    for (const std::size_t r : fit)
      if (r >= data.n_samples())
        throw InvalidConfig("normalize: fit row " + std::to_string(r) + " is out of range");
  }

  EncodedDataset out = data;
  Scaler scaler;
  scaler.min.resize(data.n_columns());
  scaler.max.resize(data.n_columns());

  for (std::size_t c = 0; c < data.n_columns(); ++c) {
    double lo = data.x(fit[0], c), hi = lo;
    for (const std::size_t r : fit) {
      lo = std::min(lo, data.x(r, c));
      hi = std::max(hi, data.x(r, c));
    }
    scaler.min[c] = lo;
    scaler.max[c] = hi;
    const double range = hi - lo;
    for (std::size_t r = 0; r < data.n_samples(); ++r)
      out.x(r, c) = (range == 0.0) ? 0.0 : (data.x(r, c) - lo) / range;
  }

  out.scaler = std::move(scaler);
  return out;
}

FoldPlan stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidConfig("stratified_kfold: k must be >= 2");
  if (labels.size() < static_cast<std::size_t>(k))
    throw TooFewSamples("stratified_kfold: " + std::to_string(labels.size()) +
                        " samples cannot fill " + std::to_string(k) + " folds");

  // class buckets in descending label order (+1 first for the binary case)
  std::map<int, std::vector<std::size_t>, std::greater<>> buckets;
  for (std::size_t i = 0; i < labels.size(); ++i) buckets[labels[i]].push_back(i);

  Rng rng(seed);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.resize(labels.size());

  // Shuffle within each class, concatenate, deal round-robin. Dealing a
  // contiguous block per class keeps both the overall fold sizes and the
  // per-fold class counts within one of each other.
  std::size_t position = 0;
  for (auto& [label, rows] : buckets) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.index(i)]);
    for (const std::size_t row : rows) {
      plan.assignments[row] = static_cast<int>(position % static_cast<std::size_t>(k));
      ++position;
    }
  }
  return plan;
}

SynthDataset synth_generate(std::size_t n, std::size_t n_features, std::size_t n_informative,
                            double noise, std::uint64_t seed) {
  if (n == 0 || n_features == 0 || n_informative == 0 || n_informative > n_features)
    throw InvalidConfig("synth_generate: need 1 <= n_informative <= n_features and n >= 1");
  if (noise < 0.0) throw InvalidConfig("synth_generate: noise must be nonnegative");

  Rng rng(seed);

  std::vector<std::size_t> informative(n_features);
  for (std::size_t i = 0; i < n_features; ++i) informative[i] = i;
  for (std::size_t i = n_features; i > 1; --i) std::swap(informative[i - 1], informative[rng.index(i)]);
  informative.resize(n_informative);
  std::sort(informative.begin(), informative.end());

  // alternating weights over the informative coordinates
  std::vector<double> weights(n_informative);
  for (std::size_t j = 0; j < n_informative; ++j) weights[j] = (j % 2 == 0) ? 1.0 : -1.0;
  const double margin = 0.05 * std::sqrt(static_cast<double>(n_informative));

  SynthDataset out;
  out.informative = informative;
  out.data.x = Matrix(n, n_features);
  out.data.labels.resize(n);
  for (std::size_t c = 0; c < n_features; ++c)
    out.data.columns.push_back({"f" + std::to_string(c), std::nullopt});

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n_features; ++c) out.data.x(r, c) = rng.uniform();

    const double want = (r % 2 == 0) ? 1.0 : -1.0;
    double score = 0.0;
    for (;;) {
      score = 0.0;
      for (std::size_t j = 0; j < n_informative; ++j)
        score += weights[j] * (out.data.x(r, informative[j]) - 0.5);
      if (score * want >= margin) break;
      for (std::size_t j = 0; j < n_informative; ++j) out.data.x(r, informative[j]) = rng.uniform();
    }

    const double noisy = score + noise * rng.gaussian();
    out.data.labels[r] = noisy >= 0.0 ? +1 : -1;
  }
  return out;
}

void write_encoded_csv(std::ostream& out, const EncodedDataset& data) {
  const auto names = data.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) out << names[c] << ',';
  out << "label\n";
  char buf[64];
  for (std::size_t r = 0; r < data.n_samples(); ++r) {
    for (std::size_t c = 0; c < data.n_columns(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", data.x(r, c));
      out << buf << ',';
    }
    out << (data.labels[r] > 0 ? "+1" : "-1") << '\n';
  }
}

std::vector<std::uint8_t> mask_from_columns(const EncodedDataset& data,
                                            std::span<const std::string> names) {
  const auto all = data.column_names();
  std::vector<std::uint8_t> mask(all.size(), 0);
  for (const auto& name : names) {
    const auto it = std::find(all.begin(), all.end(), name);
    if (it == all.end()) throw InvalidConfig("mask references unknown column '" + name + "'");
    mask[static_cast<std::size_t>(it - all.begin())] = 1;
  }
  return mask;
}

}  // namespace gsvma::dataset
