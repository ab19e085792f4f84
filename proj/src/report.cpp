#include "gsvma/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gsvma::report {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pct(double v) { return fmt("%.2f", 100.0 * v); }

nlohmann::ordered_json metrics_json(const eval::Metrics& m) {
  return {{"accuracy", m.accuracy}, {"ppv", m.ppv},
          {"recall", m.recall},     {"specificity", m.specificity},
          {"f_measure", m.f_measure}, {"degenerate", m.degenerate}};
}

nlohmann::ordered_json confusion_json(const eval::ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

}  // namespace

nlohmann::ordered_json kernel_json(const kernels::KernelSpec& spec) {
  nlohmann::ordered_json j;
  j["family"] = kernels::family_name(spec.family);
  switch (spec.family) {
    case kernels::Family::Linear:
      break;
    case kernels::Family::Polynomial:
      j["degree"] = spec.degree;
      break;
    case kernels::Family::Rbf:
      j["gamma"] = spec.gamma;
      break;
    case kernels::Family::Anova:
      j["sigma"] = spec.sigma;
      j["degree"] = spec.degree;
      break;
  }
  return j;
}

kernels::KernelSpec kernel_from_json(const nlohmann::json& j) {
  kernels::KernelSpec spec;
  spec.family = kernels::family_from_name(j.at("family").get<std::string>());
  if (j.contains("degree")) spec.degree = j.at("degree").get<int>();
  if (j.contains("gamma")) spec.gamma = j.at("gamma").get<double>();
  if (j.contains("sigma")) spec.sigma = j.at("sigma").get<double>();
  spec.validate();
  return spec;
}

nlohmann::ordered_json eval_report_json(const eval::EvalReport& report, const RunInfo& info) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = info.method;
  j["config"] = {{"c", info.svm.c},
                 {"kernel", kernel_json(info.svm.kernel)},
                 {"tolerance", info.svm.tolerance},
                 {"normalize", info.normalize},
                 {"folds", report.folds},
                 {"fold_seed", report.fold_seed}};
  j["n_samples"] = report.n_samples;
  if (info.mask_columns.empty())
    j["mask_columns"] = "all";
  else
    j["mask_columns"] = info.mask_columns;
  j["metrics"] = {{"micro", metrics_json(report.micro)}, {"macro", metrics_json(report.macro)}};
  j["pooled_confusion"] = confusion_json(report.pooled);
  auto folds = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < report.fold_cm.size(); ++f) {
    auto fj = confusion_json(report.fold_cm[f]);
    fj["fold"] = f;
    folds.push_back(std::move(fj));
  }
  j["per_fold"] = std::move(folds);
  auto roc = nlohmann::ordered_json::array();
  for (const auto& p : report.roc) roc.push_back({p.fpr, p.tpr});
  j["roc"] = std::move(roc);
  j["auc"] = report.auc;
  return j;
}

std::string eval_report_csv(const eval::EvalReport& report, const std::string& method) {
  std::string out = "Method,ACC,PPV,F-measure,Recall,Specificity,AUC\n";
  out += method + ',' + pct(report.micro.accuracy) + ',' + pct(report.micro.ppv) + ',' +
         pct(report.micro.f_measure) + ',' + pct(report.micro.recall) + ',' +
         pct(report.micro.specificity) + ',' + pct(report.auc) + '\n';
  return out;
}

nlohmann::ordered_json ga_history_json(const genetic::GaHistory& history,
                                       std::span<const std::string> column_names) {
  const auto mask_names = [&](const genetic::Mask& mask) {
    auto names = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < mask.size(); ++c)
      if (mask[c]) names.push_back(column_names[c]);
    return names;
  };
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  auto records = nlohmann::ordered_json::array();
  for (const auto& rec : history.records) {
    records.push_back({{"generation", rec.generation},
                       {"best_fitness", rec.best_fitness},
                       {"mean_fitness", rec.mean_fitness},
                       {"best_mask", mask_names(rec.best_mask)}});
  }
  j["generations"] = std::move(records);
  j["fitness_evaluations"] = history.fitness_evaluations;
  j["cache_hits"] = history.cache_hits;
  return j;
}

namespace {

// shared plot frame: 640x480, unit box mapped to the margins below
constexpr double kW = 640, kH = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

double px(double v) { return kLeft + v * (kW - kLeft - kRight); }
double py(double v) { return (kH - kBottom) - v * (kH - kTop - kBottom); }

void svg_open(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";
}

void svg_axes(std::ostringstream& out, const std::string& x_label, const std::string& y_label) {
  out << "<line x1=\"" << fmt("%.1f", px(0)) << "\" y1=\"" << fmt("%.1f", py(0)) << "\" x2=\""
      << fmt("%.1f", px(1)) << "\" y2=\"" << fmt("%.1f", py(0)) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt("%.1f", px(0)) << "\" y1=\"" << fmt("%.1f", py(0)) << "\" x2=\""
      << fmt("%.1f", px(0)) << "\" y2=\"" << fmt("%.1f", py(1)) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    out << "<text x=\"" << fmt("%.1f", px(v)) << "\" y=\"" << fmt("%.1f", py(0) + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt("%.1f", v) << "</text>\n";
    out << "<text x=\"" << fmt("%.1f", px(0) - 8) << "\" y=\"" << fmt("%.1f", py(v) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt("%.1f", v)
        << "</text>\n";
  }
  out << "<text x=\"" << fmt("%.1f", px(0.5)) << "\" y=\"" << fmt("%.1f", kH - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt("%.1f", py(0.5))
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 "
      << fmt("%.1f", py(0.5)) << ")\">" << y_label << "</text>\n";
}

}  // namespace

std::string roc_svg(std::span<const eval::RocPoint> points, double auc_value,
                    const std::string& title) {
  std::ostringstream out;
  svg_open(out, title);
  svg_axes(out, "False positive rate", "True positive rate");
  out << "<line x1=\"" << fmt("%.1f", px(0)) << "\" y1=\"" << fmt("%.1f", py(0)) << "\" x2=\""
      << fmt("%.1f", px(1)) << "\" y2=\"" << fmt("%.1f", py(1))
      << "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f6feb\" stroke-width=\"2\" points=\"";
  for (const auto& p : points) out << fmt("%.2f", px(p.fpr)) << ',' << fmt("%.2f", py(p.tpr)) << ' ';
  out << "\"/>\n";
  out << "<text x=\"" << fmt("%.1f", px(0.62)) << "\" y=\"" << fmt("%.1f", py(0.08))
      << "\" font-family=\"sans-serif\" font-size=\"13\">AUC = " << fmt("%.4f", auc_value)
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string fitness_svg(const genetic::GaHistory& history, const std::string& title) {
  std::ostringstream out;
  svg_open(out, title);
  svg_axes(out, "Generation", "Fitness (pooled CV accuracy)");
  const std::size_t n = history.records.size();
  const auto gx = [&](std::size_t g) {
    return n <= 1 ? px(0.5) : px(static_cast<double>(g) / static_cast<double>(n - 1));
  };
  out << "<polyline fill=\"none\" stroke=\"#aaaaaa\" stroke-width=\"2\" "
         "stroke-dasharray=\"5 3\" points=\"";
  for (std::size_t g = 0; g < n; ++g)
    out << fmt("%.2f", gx(g)) << ',' << fmt("%.2f", py(history.records[g].mean_fitness)) << ' ';
  out << "\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f6feb\" stroke-width=\"2\" points=\"";
  for (std::size_t g = 0; g < n; ++g)
    out << fmt("%.2f", gx(g)) << ',' << fmt("%.2f", py(history.records[g].best_fitness)) << ' ';
  out << "\"/>\n";
  out << "<text x=\"" << fmt("%.1f", px(0.02)) << "\" y=\"" << fmt("%.1f", py(0.08))
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f6feb\">best</text>\n";
  out << "<text x=\"" << fmt("%.1f", px(0.02)) << "\" y=\"" << fmt("%.1f", py(0.03))
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#888888\">mean</text>\n";
  out << "</svg>\n";
  return out.str();
}

ComparisonRow comparison_row_from_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("report file '" + path + "': " + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != kSchemaVersion)
    throw InvalidConfig("report file '" + path + "': unsupported schema version");
  ComparisonRow row;
  try {
    row.method = j.at("method").get<std::string>();
    const auto& micro = j.at("metrics").at("micro");
    row.accuracy = micro.at("accuracy").get<double>();
    row.ppv = micro.at("ppv").get<double>();
    row.f_measure = micro.at("f_measure").get<double>();
    row.recall = micro.at("recall").get<double>();
    row.specificity = micro.at("specificity").get<double>();
    row.auc = j.at("auc").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("report file '" + path + "': " + e.what());
  }
  return row;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::string out = "Method,ACC,PPV,F-measure,Recall,Specificity,AUC\n";
  for (const auto& r : rows)
    out += r.method + ',' + pct(r.accuracy) + ',' + pct(r.ppv) + ',' + pct(r.f_measure) + ',' +
           pct(r.recall) + ',' + pct(r.specificity) + ',' + pct(r.auc) + '\n';
  return out;
}

std::string comparison_markdown(std::span<const ComparisonRow> rows) {
  std::string out =
      "| Method | ACC (%) | PPV (%) | F-measure (%) | Recall (%) | Specificity (%) | AUC (%) |\n"
      "|--------|---------|---------|---------------|------------|-----------------|---------|\n";
  for (const auto& r : rows)
    out += "| " + r.method + " | " + pct(r.accuracy) + " | " + pct(r.ppv) + " | " +
           pct(r.f_measure) + " | " + pct(r.recall) + " | " + pct(r.specificity) + " | " +
           pct(r.auc) + " |\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gsvma::report
