#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsvma/eval.hpp"
#include "gsvma/genetic.hpp"

namespace gsvma::report {

inline constexpr int kSchemaVersion = 1;

/// Extra run context echoed into report files.
struct RunInfo {
  std::string method;
  svm::SvmConfig svm{};
  std::string normalize = "per-fold";
  std::vector<std::string> mask_columns;  // empty = all columns
};

nlohmann::ordered_json kernel_json(const kernels::KernelSpec& spec);
kernels::KernelSpec kernel_from_json(const nlohmann::json& j);

nlohmann::ordered_json eval_report_json(const eval::EvalReport& report, const RunInfo& info);

/// Header plus one row in Table-3 column order:
/// Method,ACC,PPV,F-measure,Recall,Specificity,AUC (percent, 2 decimals).
std::string eval_report_csv(const eval::EvalReport& report, const std::string& method);

nlohmann::ordered_json ga_history_json(const genetic::GaHistory& history,
                                       std::span<const std::string> column_names);

/// Self-contained polyline SVG plots. No timestamps, fixed float
/// formatting, so identical inputs serialize byte-identically.
std::string roc_svg(std::span<const eval::RocPoint> points, double auc_value,
                    const std::string& title);
std::string fitness_svg(const genetic::GaHistory& history, const std::string& title);

/// One comparison row extracted from a report JSON file.
struct ComparisonRow {
  std::string method;
  double accuracy = 0.0;
  double ppv = 0.0;
  double f_measure = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double auc = 0.0;
};

/// Throws Error naming the file on schema-version mismatch.
ComparisonRow comparison_row_from_file(const std::string& path);
std::string comparison_csv(std::span<const ComparisonRow> rows);
std::string comparison_markdown(std::span<const ComparisonRow> rows);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace gsvma::report
