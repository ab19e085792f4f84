#include "gsvma/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsvma::eval {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) throw LengthMismatch("confusion: input lengths differ");
  if (y_true.empty()) throw EmptyInput("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] > 0)
      (y_pred[i] > 0 ? cm.tp : cm.fn) += 1;
    else
      (y_pred[i] > 0 ? cm.fp : cm.tn) += 1;
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyMatrix("metrics: confusion matrix is empty");
  Metrics m;
  const auto ratio = [&m](double num, double den) {
    if (den == 0.0) {
      m.degenerate = true;
      return 0.0;
    }
    return num / den;
  };
  const double tp = static_cast<double>(cm.tp);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  const double tn = static_cast<double>(cm.tn);
  m.accuracy = (tp + tn) / static_cast<double>(cm.total());
  m.specificity = ratio(tn, tn + fp);
  m.ppv = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f_measure = ratio(2.0 * m.ppv * m.recall, m.ppv + m.recall);
  return m;
}

std::vector<RocPoint> roc_curve(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw LengthMismatch("roc_curve: input lengths differ");
  if (y_true.empty()) throw EmptyInput("roc_curve: empty input");
  std::size_t pos = 0, neg = 0;
  for (const int y : y_true) (y > 0 ? pos : neg) += 1;
  if (pos == 0 || neg == 0) throw SingleClassInput("roc_curve: both classes required");

  std::vector<std::size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0});
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (y_true[order[i]] > 0 ? tp : fp) += 1;
    const bool group_end = (i + 1 == order.size()) || (scores[order[i + 1]] != scores[order[i]]);
    if (group_end)
      points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                        static_cast<double>(tp) / static_cast<double>(pos)});
  }
  return points;  // last point is (1,1) by construction
}

double auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  return area;
}

Matrix masked_rows(const Matrix& x, std::span<const std::size_t> rows,
                   std::span<const std::uint8_t> mask) {
  std::vector<std::size_t> cols;
  if (mask.empty()) {
    cols.resize(x.cols());
    std::iota(cols.begin(), cols.end(), 0);
  } else {
    if (mask.size() != x.cols()) throw LengthMismatch("mask length must equal column count");
    for (std::size_t c = 0; c < mask.size(); ++c)
      if (mask[c]) cols.push_back(c);
    if (cols.empty()) throw InvalidConfig("mask selects no columns");
  }
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = x(rows[r], cols[c]);
  return out;
}

std::vector<FoldOutcome> fold_outcomes(const dataset::EncodedDataset& data,
                                       std::span<const std::uint8_t> mask,
                                       const dataset::FoldPlan& folds,
                                       const svm::SvmConfig& config,
                                       std::optional<dataset::NormalizePolicy> policy,
                                       std::size_t threads) {
  if (folds.assignments.size() != data.n_samples())
    throw LengthMismatch("fold plan does not match the dataset");
  if (!mask.empty()) {
    if (mask.size() != data.n_columns()) throw LengthMismatch("mask length must equal column count");
    if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b == 0; }))
      throw InvalidConfig("mask selects no columns");
  }

  const dataset::EncodedDataset* source = &data;
  dataset::EncodedDataset global;
  if (policy == dataset::NormalizePolicy::Global) {
    global = dataset::normalize(data, dataset::NormalizePolicy::Global);
    source = &global;
  }

  std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(folds.k));
  parallel_for(static_cast<std::size_t>(folds.k), threads, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const std::vector<std::size_t> train_rows = folds.complement_rows(fold);
    const std::vector<std::size_t> test_rows = folds.fold_rows(fold);
    if (test_rows.empty()) return;  // an empty fold contributes nothing

    try {
      const dataset::EncodedDataset* view = source;
      dataset::EncodedDataset refit;
      if (policy == dataset::NormalizePolicy::PerFoldFit) {
        refit = dataset::normalize(data, dataset::NormalizePolicy::PerFoldFit, train_rows);
        view = &refit;
      }

      const Matrix train_x = masked_rows(view->x, train_rows, mask);
      std::vector<int> train_y(train_rows.size());
      for (std::size_t r = 0; r < train_rows.size(); ++r) train_y[r] = view->labels[train_rows[r]];

      svm::SvmModel model = svm::train(train_x, train_y, config);

      FoldOutcome& out = outcomes[f];
      out.rows = test_rows;
      const Matrix test_x = masked_rows(view->x, test_rows, mask);
      std::vector<int> y_true(test_rows.size()), y_pred(test_rows.size());
      out.scores.resize(test_rows.size());
      for (std::size_t r = 0; r < test_rows.size(); ++r) {
        out.scores[r] = svm::decision_value(model, test_x.row(r));
        y_pred[r] = out.scores[r] >= 0.0 ? +1 : -1;
        y_true[r] = view->labels[test_rows[r]];
      }
      out.cm = confusion(y_true, y_pred);
    } catch (const Error& e) {
      throw Error("fold " + std::to_string(fold) + ": " + e.what());
    }
  });
  return outcomes;
}

EvalReport cross_validate(const dataset::EncodedDataset& data, std::span<const std::uint8_t> mask,
                          const dataset::FoldPlan& folds, const svm::SvmConfig& config,
                          dataset::NormalizePolicy policy, std::size_t threads) {
  const std::vector<FoldOutcome> outcomes = fold_outcomes(data, mask, folds, config, policy, threads);

  EvalReport report;
  report.folds = folds.k;
  report.fold_seed = folds.seed;
  report.n_samples = data.n_samples();

  Metrics macro_sum;
  std::size_t scored_folds = 0;
  std::vector<int> pooled_true;
  std::vector<double> pooled_scores;
  pooled_true.reserve(data.n_samples());
  pooled_scores.reserve(data.n_samples());

  for (const FoldOutcome& out : outcomes) {
    if (out.rows.empty()) continue;
    report.fold_cm.push_back(out.cm);
    report.pooled += out.cm;
    const Metrics fm = metrics(out.cm);
    macro_sum.accuracy += fm.accuracy;
    macro_sum.ppv += fm.ppv;
    macro_sum.recall += fm.recall;
    macro_sum.specificity += fm.specificity;
    macro_sum.f_measure += fm.f_measure;
    macro_sum.degenerate = macro_sum.degenerate || fm.degenerate;
    ++scored_folds;
    for (std::size_t r = 0; r < out.rows.size(); ++r) {
      pooled_true.push_back(data.labels[out.rows[r]]);
      pooled_scores.push_back(out.scores[r]);
    }
  }
  if (scored_folds == 0) throw EmptyInput("cross_validate: no fold produced predictions");

  report.micro = metrics(report.pooled);
  const double k = static_cast<double>(scored_folds);
  report.macro = {macro_sum.accuracy / k, macro_sum.ppv / k, macro_sum.recall / k,
                  macro_sum.specificity / k, macro_sum.f_measure / k, macro_sum.degenerate};
  report.roc = roc_curve(pooled_true, pooled_scores);
  report.auc = auc(report.roc);
  return report;
}

}  // namespace gsvma::eval
