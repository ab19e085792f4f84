#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gsvma/common.hpp"

namespace gsvma::dataset {

enum class FeatureKind { Numeric, BinaryNominal, MultiNominal };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  std::vector<std::string> values;  // allowed nominal values, declared order
};

struct RawSchema {
  std::vector<FeatureSpec> features;
  std::string target;
  std::string positive_label;  // mapped to +1
  std::string negative_label;  // mapped to -1

  const FeatureSpec* find(const std::string& name) const;
};

/// One validated cell: numeric features keep the parsed number, nominal
/// features keep the validated string.
using RawCell = std::variant<double, std::string>;

struct RawDataset {
  RawSchema schema;
  std::vector<std::vector<RawCell>> records;  // cells in schema.features order
  std::vector<std::string> targets;           // raw target labels, one per record

  std::size_t size() const { return records.size(); }
};

struct ColumnMeta {
  std::string source;                // feature the column came from
  std::optional<std::string> value;  // set for one-hot columns

  std::string name() const { return value ? source + "=" + *value : source; }
  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

struct Scaler {
  std::vector<double> min;
  std::vector<double> max;
};

struct EncodedDataset {
  Matrix x;
  std::vector<ColumnMeta> columns;
  std::vector<int> labels;  // +1 / -1
  std::optional<Scaler> scaler;  // present once normalized

  std::size_t n_samples() const { return x.rows(); }
  std::size_t n_columns() const { return x.cols(); }
  std::vector<std::string> column_names() const;
};

enum class NormalizePolicy { Global, PerFoldFit };

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // fold index per sample, 0..k-1
  std::uint64_t seed = 0;

  std::vector<std::size_t> fold_rows(int fold) const;
  std::vector<std::size_t> complement_rows(int fold) const;
  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

// --- errors -----------------------------------------------------------

struct MissingColumn : Error {
  using Error::Error;
};
struct UnknownColumn : Error {
  using Error::Error;
};
struct MissingValue : Error {
  MissingValue(std::size_t record, std::string column);
  std::size_t record;
  std::string column;
};
struct IllegalNominalValue : Error {
  IllegalNominalValue(std::size_t record, std::string column, std::string value);
  std::size_t record;
  std::string column;
  std::string value;
};
struct NonNumericCell : Error {
  NonNumericCell(std::size_t record, std::string column, std::string text);
  std::size_t record;
  std::string column;
  std::string text;
};
struct TooFewSamples : Error {
  using Error::Error;
};
struct EmptyFitSet : Error {
  using Error::Error;
};

// --- operations -------------------------------------------------------

/// Sidecar schema format, one `key = value` pair per line, `#` comments.
/// Keys: target, positive, negative and feature.<name> whose value is
/// `numeric`, `binary(a,b)` or `multi(v1,v2,...)`. Feature order in the
/// file fixes the schema order.
RawSchema load_schema(std::istream& in);
RawSchema load_schema_file(const std::string& path);

/// Strict CSV: comma separated, UTF-8, required header, no quoting. Cells
/// are validated against the schema; any violation throws one of the error
/// types above.
RawDataset parse_csv(std::istream& in, const RawSchema& schema);
RawDataset parse_csv_file(const std::string& path, const RawSchema& schema);

/// Numeric features pass through, binary nominals map to {0,1} in declared
/// value order, multi-valued nominals expand to one-hot `Feature=Value`
/// columns. Target maps positive -> +1, negative -> -1.
EncodedDataset encode(const RawDataset& raw);

/// Min-max scaling to [0,1]. Global fits on all rows; PerFoldFit fits on
/// fit_rows only and applies to every row (values outside the fit range
/// land outside [0,1]). Columns constant on the fit set map to 0.
EncodedDataset normalize(const EncodedDataset& data, NormalizePolicy policy,
                         std::span<const std::size_t> fit_rows = {});

/// Stratified fold assignment: per class, indices are shuffled and dealt
/// round-robin, so fold sizes and per-fold class counts each differ by at
/// most one. Deterministic for a fixed seed.
FoldPlan stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

struct SynthDataset {
  EncodedDataset data;
  std::vector<std::size_t> informative;  // planted column indices, ascending
};

/// Features are uniform on [0,1]; labels follow a fixed +/- pattern and the
/// informative coordinates are resampled until a linear score matches that
/// pattern with a margin, so noise == 0 yields linearly separable classes.
/// Gaussian noise on the score then flips labels near the boundary.
SynthDataset synth_generate(std::size_t n, std::size_t n_features, std::size_t n_informative,
                            double noise, std::uint64_t seed);

/// Encoded matrix as CSV with generated column names plus a `label` column.
void write_encoded_csv(std::ostream& out, const EncodedDataset& data);

/// Bitmask over encoded columns from a list of column names (throws
/// InvalidConfig on names that do not match any column).
std::vector<std::uint8_t> mask_from_columns(const EncodedDataset& data,
                                            std::span<const std::string> names);

}  // namespace gsvma::dataset
