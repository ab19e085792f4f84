#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gsvma/dataset.hpp"
#include "gsvma/eval.hpp"
#include "gsvma/genetic.hpp"
#include "gsvma/presets.hpp"
#include "gsvma/report.hpp"
#include "gsvma/svm.hpp"

namespace fs = std::filesystem;
using namespace gsvma;

namespace {

struct CommonArgs {
  std::string dataset_path;
  std::string schema_path;
  std::string out_dir = "out";
  std::size_t threads = 0;  // 0 = hardware
};

struct KernelArgs {
  std::string method = "svm-anova";
  double c = 1.0;
  std::vector<double> c_grid;
  double gamma = 0.0;  // 0 = 1/n_columns default
  double sigma = 1.0;
  int degree = 1;
};

dataset::EncodedDataset load_encoded(const CommonArgs& args) {
  const dataset::RawSchema schema = dataset::load_schema_file(args.schema_path);
  const dataset::RawDataset raw = dataset::parse_csv_file(args.dataset_path, schema);
  return dataset::encode(raw);
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory: " + dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

kernels::KernelSpec kernel_for(const KernelArgs& args, std::size_t n_columns) {
  if (args.method == "svm-linear") return kernels::KernelSpec::linear();
  if (args.method == "svm-rbf")
    return kernels::KernelSpec::rbf(args.gamma > 0.0 ? args.gamma
                                                     : 1.0 / static_cast<double>(n_columns));
  if (args.method == "svm-anova" || args.method == "gsvma")
    return kernels::KernelSpec::anova(args.sigma, args.degree);
  throw InvalidConfig("unknown method: " + args.method);
}

dataset::NormalizePolicy policy_from_name(const std::string& name) {
  if (name == "global") return dataset::NormalizePolicy::Global;
  if (name == "per-fold") return dataset::NormalizePolicy::PerFoldFit;
  throw InvalidConfig("unknown normalization policy: " + name);
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string summary_text(const dataset::EncodedDataset& data) {
  std::size_t positive = 0;
  for (const int y : data.labels) positive += (y > 0);
  std::ostringstream out;
  out << "samples " << data.n_samples() << "\n";
  out << "positive " << positive << "\n";
  out << "negative " << data.n_samples() - positive << "\n";
  out << "columns " << data.n_columns() << "\n";
  for (const auto& name : data.column_names()) out << "column " << name << "\n";
  return out.str();
}

void write_eval_outputs(const std::string& out_dir, const std::string& stem,
                        const eval::EvalReport& result, const report::RunInfo& info) {
  report::write_file(join_path(out_dir, stem + ".json"),
                     report::eval_report_json(result, info).dump(2) + "\n");
  report::write_file(join_path(out_dir, stem + ".csv"),
                     report::eval_report_csv(result, info.method));
  report::write_file(join_path(out_dir, "roc_" + stem + ".svg"),
                     report::roc_svg(result.roc, result.auc, info.method + " ROC"));
}

void save_full_model(const std::string& path, const dataset::EncodedDataset& encoded,
                     const std::vector<std::uint8_t>& mask, const svm::SvmConfig& config) {
  const dataset::EncodedDataset normalized =
      dataset::normalize(encoded, dataset::NormalizePolicy::Global);
  std::vector<std::size_t> all_rows(normalized.n_samples());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
  const Matrix x = eval::masked_rows(normalized.x, all_rows, mask);
  svm::SvmModel model = svm::train(x, normalized.labels, config);
  model.column_mask = mask;
  std::ostringstream buffer;
  svm::save_model(buffer, model);
  report::write_file(path, buffer.str());
}

std::string trimmed(std::string s) {
  const auto is_space = [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

/// Key=value config file support. Each key names a long option of the
/// chosen subcommand; pairs only fill options absent from the command
/// line, so flags always win.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::istringstream in(report::read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string flag = "--" + trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    if (flag == "--") throw InvalidConfig("config line " + std::to_string(line_no) + ": empty key");

    bool present = false;
    for (const auto& arg : args)
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;

    if (value == "true") {
      args.push_back(flag);
    } else if (value == "false") {
      // explicit off for a flag: nothing to add
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

std::vector<std::string> read_mask_names(const std::string& source) {
  if (source == "paper35") return presets::paper35_columns();
  std::istringstream in(report::read_file(source));
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  if (names.empty()) throw InvalidConfig("mask file lists no columns: " + source);
  return names;
}

// --- preprocess ---------------------------------------------------------

int run_preprocess(const CommonArgs& common, const std::string& normalize_mode, bool dry_run) {
  dataset::EncodedDataset encoded = load_encoded(common);
  if (normalize_mode == "global")
    encoded = dataset::normalize(encoded, dataset::NormalizePolicy::Global);

  const std::string summary = summary_text(encoded);
  std::cout << summary;
  if (dry_run) return 0;

  ensure_out_dir(common.out_dir);
  std::ostringstream csv;
  dataset::write_encoded_csv(csv, encoded);
  report::write_file(join_path(common.out_dir, "encoded.csv"), csv.str());
  report::write_file(join_path(common.out_dir, "summary.txt"), summary);
  return 0;
}

// --- cv -------------------------------------------------------------------

int run_cv(const CommonArgs& common, const KernelArgs& kernel_args, int folds,
           std::uint64_t fold_seed, const std::string& normalize_mode, bool save_model) {
  const dataset::EncodedDataset encoded = load_encoded(common);
  const dataset::FoldPlan plan = dataset::stratified_kfold(encoded.labels, folds, fold_seed);
  const dataset::NormalizePolicy policy = policy_from_name(normalize_mode);
  ensure_out_dir(common.out_dir);

  std::vector<double> c_values = kernel_args.c_grid;
  if (c_values.empty()) c_values.push_back(kernel_args.c);
  const bool grid = c_values.size() > 1;

  for (const double c : c_values) {
    svm::SvmConfig config;
    config.c = c;
    config.kernel = kernel_for(kernel_args, encoded.n_columns());

    const eval::EvalReport result =
        eval::cross_validate(encoded, {}, plan, config, policy, common.threads);

    report::RunInfo info;
    info.method = kernel_args.method;
    info.svm = config;
    info.normalize = normalize_mode;
    const std::string stem = grid ? "report_c" + number(c) : "report";
    write_eval_outputs(common.out_dir, stem, result, info);
    if (save_model)
      save_full_model(
          join_path(common.out_dir, grid ? "model_c" + number(c) + ".txt" : "model.txt"), encoded,
          {}, config);
    std::cout << kernel_args.method << " C=" << number(c)
              << " accuracy=" << result.micro.accuracy << " auc=" << result.auc << "\n";
  }
  return 0;
}

// --- gsvma -----------------------------------------------------------------

struct GsvmaArgs {
  std::size_t population = 50;
  std::size_t generations = 10;
  double crossover_p = 0.75;
  double mutation_p = 1.0;
  std::size_t elitism = 1;
  std::uint64_t seed = 1;
  int ga_folds = 10;
  std::uint64_t ga_fold_seed = 2;
  bool no_inject = false;
  std::string gene_space = "encoded";  // encoded | raw
  std::string preset_mask;             // skip the GA when set
};

std::vector<std::vector<std::size_t>> raw_gene_groups(const dataset::EncodedDataset& encoded) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t c = 0; c < encoded.columns.size(); ++c) {
    if (c == 0 || encoded.columns[c].source != encoded.columns[c - 1].source) groups.emplace_back();
    groups.back().push_back(c);
  }
  return groups;
}

int run_gsvma(const CommonArgs& common, const KernelArgs& kernel_args, const GsvmaArgs& ga_args,
              int folds, std::uint64_t fold_seed, const std::string& normalize_mode,
              bool save_model) {
  const dataset::EncodedDataset encoded = load_encoded(common);
  ensure_out_dir(common.out_dir);

  svm::SvmConfig svm_config;
  svm_config.c = kernel_args.c;
  svm_config.kernel = kernel_for(kernel_args, encoded.n_columns());

  std::vector<std::uint8_t> best_mask;
  if (!ga_args.preset_mask.empty()) {
    best_mask = dataset::mask_from_columns(encoded, read_mask_names(ga_args.preset_mask));
  } else {
    genetic::GaConfig config;
    config.population_size = ga_args.population;
    config.generations = ga_args.generations;
    config.crossover_p = ga_args.crossover_p;
    config.mutation_p = ga_args.mutation_p;
    config.elitism = ga_args.elitism;
    config.seed = ga_args.seed;
    config.inner_cv_folds = ga_args.ga_folds;
    config.fold_seed = ga_args.ga_fold_seed;
    config.inject_full_mask = !ga_args.no_inject;
    config.threads = common.threads;
    config.svm = svm_config;
    if (ga_args.gene_space == "raw") config.gene_groups = raw_gene_groups(encoded);

    // the GA scores masks on the globally normalized matrix
    const dataset::EncodedDataset ga_data =
        dataset::normalize(encoded, dataset::NormalizePolicy::Global);
    const auto names = encoded.column_names();

    genetic::GaHistory partial;
    config.on_generation = [&partial](const genetic::GenerationRecord& rec) {
      partial.records.push_back(rec);
    };
    genetic::GaResult result;
    try {
      result = genetic::run_ga(ga_data, config);
    } catch (const Error&) {
      // flush whatever completed for diagnosis, then surface the failure
      auto j = report::ga_history_json(partial, names);
      j["partial"] = true;
      report::write_file(join_path(common.out_dir, "ga_history.json"), j.dump(2) + "\n");
      throw;
    }
    best_mask = result.best_columns;

    report::write_file(join_path(common.out_dir, "ga_history.json"),
                       report::ga_history_json(result.history, names).dump(2) + "\n");
    report::write_file(join_path(common.out_dir, "fitness.svg"),
                       report::fitness_svg(result.history, "GSVMA fitness by generation"));
    std::cout << "ga best fitness=" << *result.best.fitness << " selected="
              << std::count(best_mask.begin(), best_mask.end(), std::uint8_t{1}) << " columns\n";
  }

  std::vector<std::string> selected;
  for (std::size_t c = 0; c < best_mask.size(); ++c)
    if (best_mask[c]) selected.push_back(encoded.columns[c].name());
  std::string mask_text;
  for (const auto& name : selected) mask_text += name + "\n";
  report::write_file(join_path(common.out_dir, "best_mask.txt"), mask_text);

  // final evaluation of the selected mask on a fresh fold plan
  const dataset::FoldPlan plan = dataset::stratified_kfold(encoded.labels, folds, fold_seed);
  const eval::EvalReport result = eval::cross_validate(
      encoded, best_mask, plan, svm_config, policy_from_name(normalize_mode), common.threads);

  report::RunInfo info;
  info.method = "gsvma";
  info.svm = svm_config;
  info.normalize = normalize_mode;
  info.mask_columns = selected;
  write_eval_outputs(common.out_dir, "report", result, info);
  if (save_model)
    save_full_model(join_path(common.out_dir, "model.txt"), encoded, best_mask, svm_config);
  std::cout << "gsvma accuracy=" << result.micro.accuracy << " auc=" << result.auc << "\n";
  return 0;
}

// --- report ----------------------------------------------------------------

int run_report(const std::vector<std::string>& paths, const std::string& out_dir) {
  std::vector<report::ComparisonRow> rows;
  rows.reserve(paths.size());
  for (const auto& path : paths) rows.push_back(report::comparison_row_from_file(path));
  const std::string csv = report::comparison_csv(rows);
  ensure_out_dir(out_dir);
  report::write_file(join_path(out_dir, "comparison.csv"), csv);
  report::write_file(join_path(out_dir, "comparison.md"), report::comparison_markdown(rows));
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GSVMA pipeline: kernel SVM baselines and GA feature selection"};
  app.require_subcommand(1);

  CommonArgs common;
  KernelArgs kernel_args;
  GsvmaArgs ga_args;
  int folds = 10;
  std::uint64_t fold_seed = 1;
  std::string normalize_cv = "per-fold";
  std::string normalize_pre = "none";
  bool dry_run = false;
  bool save_model = false;
  std::vector<std::string> report_paths;

  std::string config_path;  // consumed by apply_config_file before parsing
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", common.dataset_path, "Input CSV file")->required();
    cmd->add_option("--schema", common.schema_path, "Schema sidecar file")->required();
    cmd->add_option("--out", common.out_dir, "Output directory");
    cmd->add_option("--threads", common.threads, "Worker cap (0 = hardware)");
    cmd->add_option("--config", config_path, "Key=value config file; flags win");
  };
  const auto add_kernel = [&](CLI::App* cmd) {
    cmd->add_option("--c,-c", kernel_args.c, "Soft-margin penalty C");
    cmd->add_option("--kernel-gamma", kernel_args.gamma, "RBF gamma (default 1/n_columns)");
    cmd->add_option("--kernel-sigma", kernel_args.sigma, "ANOVA sigma");
    cmd->add_option("--kernel-degree", kernel_args.degree, "Polynomial/ANOVA degree");
  };
  const auto add_folds = [&](CLI::App* cmd, const char* seed_names) {
    cmd->add_option("--folds", folds, "Cross-validation fold count");
    cmd->add_option(seed_names, fold_seed, "Fold-plan seed");
    cmd->add_option("--normalize", normalize_cv, "Normalization policy")
        ->check(CLI::IsMember({"global", "per-fold"}));
  };

  CLI::App* cmd_pre = app.add_subcommand("preprocess", "Encode and summarize a dataset");
  add_common(cmd_pre);
  cmd_pre->add_option("--normalize", normalize_pre, "global or none")
      ->check(CLI::IsMember({"global", "none"}));
  cmd_pre->add_flag("--dry-run", dry_run, "Validate only; write nothing");

  CLI::App* cmd_cv = app.add_subcommand("cv", "Cross-validate one kernel baseline");
  add_common(cmd_cv);
  add_kernel(cmd_cv);
  cmd_cv->add_option("--method", kernel_args.method, "svm-linear | svm-rbf | svm-anova")
      ->required()
      ->check(CLI::IsMember({"svm-linear", "svm-rbf", "svm-anova"}));
  cmd_cv->add_option("--c-grid", kernel_args.c_grid, "Sweep of C values")->delimiter(',');
  add_folds(cmd_cv, "--fold-seed,--seed");
  cmd_cv->add_flag("--save-model", save_model, "Save a model trained on all rows");

  CLI::App* cmd_ga = app.add_subcommand("gsvma", "GA feature selection over the ANOVA SVM");
  add_common(cmd_ga);
  add_kernel(cmd_ga);
  add_folds(cmd_ga, "--fold-seed");
  cmd_ga->add_option("--seed", ga_args.seed, "GA stream seed");
  cmd_ga->add_option("--population", ga_args.population, "GA population size");
  cmd_ga->add_option("--generations", ga_args.generations, "GA generation count");
  cmd_ga->add_option("--crossover-p", ga_args.crossover_p, "Crossover probability");
  cmd_ga->add_option("--mutation-p", ga_args.mutation_p, "Mutation probability");
  cmd_ga->add_option("--elitism", ga_args.elitism, "Elites copied unchanged");
  cmd_ga->add_option("--ga-folds", ga_args.ga_folds, "Inner fitness fold count");
  cmd_ga->add_option("--ga-fold-seed", ga_args.ga_fold_seed, "Inner fitness fold seed");
  cmd_ga->add_flag("--no-inject-full-mask", ga_args.no_inject,
                   "Do not seed the population with the all-features mask");
  cmd_ga->add_option("--genes", ga_args.gene_space,
                     "encoded: one gene per column; raw: one gene per source feature")
      ->check(CLI::IsMember({"encoded", "raw"}));
  cmd_ga->add_option("--ga-mask", ga_args.preset_mask,
                     "Skip the GA and evaluate a named preset (paper35) or mask file");
  cmd_ga->add_flag("--save-model", save_model, "Save a model trained on all rows");

  CLI::App* cmd_rep = app.add_subcommand("report", "Merge run reports into one comparison table");
  cmd_rep->add_option("reports", report_paths, "Report JSON files")->required();
  cmd_rep->add_option("--out", common.out_dir, "Output directory");

  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    args = apply_config_file(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());  // CLI11's vector overload pops from the back

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_pre->parsed()) return run_preprocess(common, normalize_pre, dry_run);
    if (cmd_cv->parsed())
      return run_cv(common, kernel_args, folds, fold_seed, normalize_cv, save_model);
    if (cmd_ga->parsed())
      return run_gsvma(common, kernel_args, ga_args, folds, fold_seed, normalize_cv, save_model);
    if (cmd_rep->parsed()) return run_report(report_paths, common.out_dir);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dataset::MissingColumn& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dataset::UnknownColumn& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dataset::MissingValue& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dataset::IllegalNominalValue& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dataset::NonNumericCell& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dataset::TooFewSamples& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
