#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "gsvma/report.hpp"

using namespace gsvma;
namespace fs = std::filesystem;

namespace {

eval::EvalReport sample_report() {
  eval::EvalReport r;
  r.fold_cm = {{10, 2, 1, 7}, {9, 1, 2, 8}};
  r.pooled = {19, 3, 3, 15};
  r.micro = eval::metrics(r.pooled);
  r.macro = r.micro;
  r.roc = {{0.0, 0.0}, {0.0, 0.5}, {0.5, 1.0}, {1.0, 1.0}};
  r.auc = eval::auc(r.roc);
  r.folds = 2;
  r.fold_seed = 7;
  r.n_samples = 40;
  return r;
}

report::RunInfo sample_info() {
  report::RunInfo info;
  info.method = "svm-anova";
  info.svm.c = 1.0;
  info.svm.kernel = kernels::KernelSpec::anova(1.0, 1);
  info.normalize = "per-fold";
  return info;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gsvma_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("kernel spec json round-trips") {
  for (const auto& spec :
       {kernels::KernelSpec::linear(), kernels::KernelSpec::polynomial(3),
        kernels::KernelSpec::rbf(0.25), kernels::KernelSpec::anova(1.5, 2)}) {
    CHECK(report::kernel_from_json(report::kernel_json(spec)) == spec);
  }
}

TEST_CASE("eval report json carries the documented fields") {
  const auto j = report::eval_report_json(sample_report(), sample_info());
  CHECK(j["schema_version"] == report::kSchemaVersion);
  CHECK(j["method"] == "svm-anova");
  CHECK(j["config"]["kernel"]["family"] == "anova");
  CHECK(j["mask_columns"] == "all");
  CHECK(j["pooled_confusion"]["tp"] == 19);
  CHECK(j["per_fold"].size() == 2);
  CHECK(j["roc"].size() == 4);
  CHECK(j["metrics"]["micro"]["accuracy"].get<double>() == doctest::Approx(34.0 / 40.0));
  // serialization is deterministic
  CHECK(j.dump(2) == report::eval_report_json(sample_report(), sample_info()).dump(2));
}

TEST_CASE("csv row follows the comparison-table column order") {
  const std::string csv = report::eval_report_csv(sample_report(), "svm-anova");
  CHECK(csv.starts_with("Method,ACC,PPV,F-measure,Recall,Specificity,AUC\n"));
  CHECK(csv.find("svm-anova,85.00,") != std::string::npos);  // 34/40 pooled
}

TEST_CASE("ga history json names the selected columns") {
  genetic::GaHistory history;
  history.records = {{0, 0.8, 0.6, {1, 0, 1}}, {1, 0.9, 0.7, {1, 1, 0}}};
  history.fitness_evaluations = 12;
  history.cache_hits = 3;
  const std::vector<std::string> names = {"Age", "Sex", "VHD=mild"};
  const auto j = report::ga_history_json(history, names);
  CHECK(j["generations"].size() == 2);
  CHECK(j["generations"][0]["best_mask"] == nlohmann::json::array({"Age", "VHD=mild"}));
  CHECK(j["generations"][1]["best_fitness"].get<double>() == doctest::Approx(0.9));
  CHECK(j["fitness_evaluations"] == 12);
}

TEST_CASE("svg plots are deterministic polylines without timestamps") {
  const auto rep = sample_report();
  const std::string svg = report::roc_svg(rep.roc, rep.auc, "test ROC");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("AUC =") != std::string::npos);
  CHECK(svg == report::roc_svg(rep.roc, rep.auc, "test ROC"));

  genetic::GaHistory history;
  history.records = {{0, 0.7, 0.6, {1}}, {1, 0.8, 0.7, {1}}};
  const std::string fit = report::fitness_svg(history, "fitness");
  CHECK(fit.find("best") != std::string::npos);
  CHECK(fit == report::fitness_svg(history, "fitness"));
}

TEST_CASE("comparison merge reads rows back and rejects version drift") {
  TempDir tmp;
  const auto j = report::eval_report_json(sample_report(), sample_info());
  report::write_file(tmp.file("a.json"), j.dump(2));

  auto stale = j;
  stale["schema_version"] = 999;
  report::write_file(tmp.file("b.json"), stale.dump(2));

  const auto row = report::comparison_row_from_file(tmp.file("a.json"));
  CHECK(row.method == "svm-anova");
  CHECK(row.accuracy == doctest::Approx(0.85));

  CHECK_THROWS_WITH_AS(report::comparison_row_from_file(tmp.file("b.json")),
                       doctest::Contains("b.json"), InvalidConfig);

  const std::vector<report::ComparisonRow> rows = {row, row};
  const std::string csv = report::comparison_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
  const std::string md = report::comparison_markdown(rows);
  CHECK(md.find("| svm-anova |") != std::string::npos);
}
