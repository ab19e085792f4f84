#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gsvma/dataset.hpp"
#include "gsvma/svm.hpp"

namespace gsvma::eval {

struct EmptyMatrix : Error {
  using Error::Error;
};

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Metrics {
  double accuracy = 0.0;
  double ppv = 0.0;         // precision
  double recall = 0.0;
  double specificity = 0.0;
  double f_measure = 0.0;
  bool degenerate = false;  // some 0/0 denominator was mapped to 0

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct EvalReport {
  std::vector<ConfusionMatrix> fold_cm;
  ConfusionMatrix pooled;
  Metrics micro;  // from pooled counts
  Metrics macro;  // mean of per-fold metrics
  std::vector<RocPoint> roc;
  double auc = 0.0;
  int folds = 0;
  std::uint64_t fold_seed = 0;
  std::size_t n_samples = 0;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred);

/// Accuracy, precision, recall, specificity, F-measure from the counts.
/// 0/0 denominators yield 0 and set the degenerate flag.
Metrics metrics(const ConfusionMatrix& cm);

/// One threshold step per distinct score (ties grouped); points sorted by
/// FPR, starting at (0,0) and ending at (1,1).
std::vector<RocPoint> roc_curve(std::span<const int> y_true, std::span<const double> scores);

/// Trapezoidal area; equal to the Mann-Whitney statistic with half credit
/// for tied scores.
double auc(std::span<const RocPoint> points);

/// Per fold: fit normalization per policy on the training rows, train on
/// the other k-1 folds restricted to the masked columns, score the held-out
/// fold. Pools confusion counts and decision values across folds.
EvalReport cross_validate(const dataset::EncodedDataset& data, std::span<const std::uint8_t> mask,
                          const dataset::FoldPlan& folds, const svm::SvmConfig& config,
                          dataset::NormalizePolicy policy, std::size_t threads = 1);

// --- internals shared with the genetic module -------------------------

/// Matrix restricted to rows and to mask-selected columns (empty mask = all).
Matrix masked_rows(const Matrix& x, std::span<const std::size_t> rows,
                   std::span<const std::uint8_t> mask);

struct FoldOutcome {
  ConfusionMatrix cm;
  std::vector<std::size_t> rows;    // held-out row indices
  std::vector<double> scores;       // decision values, aligned with rows
};

/// Train/score every fold with no normalization refit (the data is used as
/// given). Policy-aware normalization lives in cross_validate.
std::vector<FoldOutcome> fold_outcomes(const dataset::EncodedDataset& data,
                                       std::span<const std::uint8_t> mask,
                                       const dataset::FoldPlan& folds,
                                       const svm::SvmConfig& config,
                                       std::optional<dataset::NormalizePolicy> policy,
                                       std::size_t threads);

}  // namespace gsvma::eval
