#include "gsvma/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <list>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace gsvma::svm {

namespace {

constexpr double kTau = 1e-12;  // curvature floor for degenerate pairs

/// Kernel row access: full precomputation at desk scale, per-row LRU cache
/// above the limit.
class KernelRows {
 public:
  KernelRows(const Matrix& rows, const kernels::KernelSpec& spec, std::size_t precompute_limit,
             std::size_t cache_rows)
      : rows_(rows), spec_(spec), capacity_(std::max<std::size_t>(2, cache_rows)) {
    if (rows.rows() <= precompute_limit) full_ = kernels::gram(spec, rows);
  }

  std::span<const double> row(std::size_t i) {
    if (!full_.empty()) return full_.row(i);
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return {it->second->second.data(), rows_.rows()};
    }
    std::vector<double> values(rows_.rows());
    for (std::size_t j = 0; j < rows_.rows(); ++j)
      values[j] = kernels::kernel_eval(spec_, rows_.row(i), rows_.row(j));
    lru_.emplace_front(i, std::move(values));
    index_[i] = lru_.begin();
    if (lru_.size() > capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    return {lru_.front().second.data(), rows_.rows()};
  }

 private:
  using Entry = std::pair<std::size_t, std::vector<double>>;
  const Matrix& rows_;
  kernels::KernelSpec spec_;
  Matrix full_;
  std::size_t capacity_;
  std::list<Entry> lru_;
  std::unordered_map<std::size_t, std::list<Entry>::iterator> index_;
};

struct SmoState {
  std::vector<double> alpha;
  std::vector<double> s;  // s_i = sum_j alpha_j y_j K_ij
  bool converged = false;
  double gap = std::numeric_limits<double>::infinity();
};

SmoState smo_solve(const Matrix& rows, std::span<const int> y, const SvmConfig& config) {
  const std::size_t n = rows.rows();
  const double c = config.c;
  KernelRows kernel_rows(rows, config.kernel, config.precompute_limit, config.cache_rows);

  SmoState state;
  state.alpha.assign(n, 0.0);
  state.s.assign(n, 0.0);
  auto& alpha = state.alpha;
  auto& s = state.s;

  std::uint64_t updates = 0;
  for (;;) {
    // maximal violating pair over v_k = y_k - s_k
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = static_cast<double>(y[k]) - s[k];
      const bool in_up = (y[k] > 0) ? (alpha[k] < c) : (alpha[k] > 0.0);
      const bool in_low = (y[k] > 0) ? (alpha[k] > 0.0) : (alpha[k] < c);
      if (in_up && v > up_best) {
        up_best = v;
        i = k;
      }
      if (in_low && v < low_best) {
        low_best = v;
        j = k;
      }
    }
    if (i == n || j == n) {  // no admissible pair left
      state.converged = true;
      state.gap = 0.0;
      break;
    }
    state.gap = up_best - low_best;
    if (state.gap <= config.tolerance) {
      state.converged = true;
      break;
    }
    if (updates >= config.max_pair_updates) break;

    const std::span<const double> row_i = kernel_rows.row(i);
    const std::span<const double> row_j = kernel_rows.row(j);
    const double kii = row_i[i];
    const double kjj = row_j[j];
    const double kij = row_i[j];
    const double gi = static_cast<double>(y[i]) * s[i] - 1.0;
    const double gj = static_cast<double>(y[j]) * s[j] - 1.0;
    const double old_i = alpha[i];
    const double old_j = alpha[j];

    // Exact two-variable subproblem along the equality manifold, then clip
    // to the box. Both branches keep sum alpha_k y_k unchanged.
    double quad = kii + kjj - 2.0 * kij;
    if (quad <= 0.0) quad = kTau;
    if (y[i] != y[j]) {
      const double delta = (-gi - gj) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = -diff;
        }
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = c + diff;
        }
      }
    } else {
      const double delta = (gi - gj) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }

    const double delta_i = alpha[i] - old_i;
    const double delta_j = alpha[j] - old_j;
    if (delta_i == 0.0 && delta_j == 0.0) break;  // numerically stuck; pair would repeat

    for (std::size_t k = 0; k < n; ++k)
      s[k] += delta_i * static_cast<double>(y[i]) * row_i[k] +
              delta_j * static_cast<double>(y[j]) * row_j[k];

    ++updates;
    if (config.on_pair_update) config.on_pair_update(alpha);
  }
  return state;
}

double compute_bias(std::span<const double> alpha, std::span<const double> s,
                    std::span<const int> y, double c) {
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const double v = static_cast<double>(y[k]) - s[k];
    if (alpha[k] > 0.0 && alpha[k] < c) {
      free_sum += v;
      ++free_count;
    } else if ((alpha[k] == 0.0 && y[k] > 0) || (alpha[k] == c && y[k] < 0)) {
      lower = std::max(lower, v);  // b >= v
    } else {
      upper = std::min(upper, v);  // b <= v
    }
  }
  if (free_count > 0) return free_sum / static_cast<double>(free_count);
  if (!std::isfinite(lower)) return upper;
  if (!std::isfinite(upper)) return lower;
  return 0.5 * (lower + upper);
}

}  // namespace

void SvmConfig::validate() const {
  if (!(c > 0.0)) throw InvalidConfig("svm: C must be positive");
  if (!(tolerance > 0.0)) throw InvalidConfig("svm: tolerance must be positive");
  if (max_pair_updates == 0) throw InvalidConfig("svm: max_pair_updates must be positive");
  kernel.validate();
}

SvmModel train(const Matrix& rows, std::span<const int> labels, const SvmConfig& config) {
  config.validate();
  if (rows.rows() < 2) throw InvalidConfig("train: need at least 2 samples");
  if (labels.size() != rows.rows()) throw LengthMismatch("train: labels/rows size mismatch");
  bool has_pos = false, has_neg = false;
  for (const int y : labels) {
    if (y == 1)
      has_pos = true;
    else if (y == -1)
      has_neg = true;
    else
      throw InvalidConfig("train: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw SingleClassInput("train: both classes must be present");

  const SmoState state = smo_solve(rows, labels, config);

  double alpha_sum = 0.0;
  double quad_sum = 0.0;  // sum_i alpha_i y_i s_i = sum_ij alpha_i alpha_j y_i y_j K_ij
  for (std::size_t k = 0; k < state.alpha.size(); ++k) {
    alpha_sum += state.alpha[k];
    quad_sum += state.alpha[k] * static_cast<double>(labels[k]) * state.s[k];
  }

  SvmModel model;
  model.kernel = config.kernel;
  model.bias = compute_bias(state.alpha, state.s, labels, config.c);
  model.dual_objective = alpha_sum - 0.5 * quad_sum;
  model.converged = state.converged;
  model.achieved_violation = state.gap;

  std::vector<std::size_t> sv;
  for (std::size_t k = 0; k < state.alpha.size(); ++k)
    if (state.alpha[k] > 0.0) sv.push_back(k);
  model.sv_rows = Matrix(sv.size(), rows.cols());
  model.coeffs.reserve(sv.size());
  model.sv_indices = sv;
  for (std::size_t v = 0; v < sv.size(); ++v) {
    for (std::size_t cidx = 0; cidx < rows.cols(); ++cidx) model.sv_rows(v, cidx) = rows(sv[v], cidx);
    model.coeffs.push_back(state.alpha[sv[v]] * static_cast<double>(labels[sv[v]]));
  }
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) throw DimensionMismatch("decision_value: dimension mismatch");
  double acc = model.bias;
  for (std::size_t v = 0; v < model.coeffs.size(); ++v)
    acc += model.coeffs[v] * kernels::kernel_eval(model.kernel, model.sv_rows.row(v), x);
  return acc;
}

int predict(const SvmModel& model, std::span<const double> x) {
  return decision_value(model, x) >= 0.0 ? +1 : -1;
}

KktReport check_kkt(const SvmModel& model, const Matrix& rows, std::span<const int> labels,
                    const SvmConfig& config) {
  if (labels.size() != rows.rows()) throw LengthMismatch("check_kkt: labels/rows size mismatch");
  if (model.sv_indices.size() != model.coeffs.size())
    throw InvalidConfig("check_kkt: model does not carry its training indices");

  std::vector<double> alpha(rows.rows(), 0.0);
  for (std::size_t v = 0; v < model.sv_indices.size(); ++v) {
    const std::size_t idx = model.sv_indices[v];
    if (idx >= rows.rows()) throw InvalidConfig("check_kkt: support-vector index out of range");
    alpha[idx] = model.coeffs[v] * static_cast<double>(labels[idx]);
  }

  KktReport report;
  for (std::size_t k = 0; k < rows.rows(); ++k) {
    const double margin = static_cast<double>(labels[k]) * decision_value(model, rows.row(k));
    double violation = 0.0;
    if (alpha[k] <= 0.0)
      violation = std::max(0.0, 1.0 - margin);
    else if (alpha[k] >= config.c)
      violation = std::max(0.0, margin - 1.0);
    else
      violation = std::abs(margin - 1.0);
    report.max_violation = std::max(report.max_violation, violation);
  }
  double signed_sum = 0.0;
  for (const double coeff : model.coeffs) signed_sum += coeff;
  report.equality_residual = std::abs(signed_sum);
  return report;
}

double dual_objective(std::span<const double> alphas, std::span<const int> labels,
                      const Matrix& gram) {
  if (alphas.size() != labels.size() || gram.rows() != alphas.size() || gram.cols() != alphas.size())
    throw DimensionMismatch("dual_objective: inconsistent dimensions");
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    linear += alphas[i];
    for (std::size_t j = 0; j < alphas.size(); ++j)
      quad += alphas[i] * alphas[j] * static_cast<double>(labels[i]) *
              static_cast<double>(labels[j]) * gram(i, j);
  }
  return linear - 0.5 * quad;
}

void save_model(std::ostream& out, const SvmModel& model) {
  char buf[64];
  const auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "gsvma-model 1\n";
  out << "kernel " << kernels::family_name(model.kernel.family) << " degree=" << model.kernel.degree
      << " gamma=" << num(model.kernel.gamma) << " sigma=" << num(model.kernel.sigma) << "\n";
  out << "mask ";
  if (model.column_mask.empty()) {
    out << "-";
  } else {
    for (const auto bit : model.column_mask) out << (bit ? '1' : '0');
  }
  out << "\n";
  out << "bias " << num(model.bias) << "\n";
  out << "dual_objective " << num(model.dual_objective) << "\n";
  out << "converged " << (model.converged ? 1 : 0) << "\n";
  out << "violation " << num(model.achieved_violation) << "\n";
  out << "dim " << model.dim() << "\n";
  out << "nsv " << model.coeffs.size() << "\n";
  for (std::size_t v = 0; v < model.coeffs.size(); ++v) {
    out << "sv " << num(model.coeffs[v]);
    for (std::size_t cidx = 0; cidx < model.dim(); ++cidx) out << ' ' << num(model.sv_rows(v, cidx));
    out << "\n";
  }
}

SvmModel load_model(std::istream& in) {
  const auto fail = [](const std::string& why) { return Error("model file: " + why); };
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "gsvma-model" || version != 1)
    throw fail("missing or unsupported header");

  SvmModel model;
  std::string family;
  if (!(in >> word >> family) || word != "kernel") throw fail("expected kernel line");
  model.kernel.family = kernels::family_from_name(family);
  for (int p = 0; p < 3; ++p) {
    if (!(in >> word)) throw fail("truncated kernel line");
    const auto eq = word.find('=');
    if (eq == std::string::npos) throw fail("malformed kernel parameter: " + word);
    const std::string key = word.substr(0, eq);
    const double value = std::stod(word.substr(eq + 1));
    if (key == "degree")
      model.kernel.degree = static_cast<int>(value);
    else if (key == "gamma")
      model.kernel.gamma = value;
    else if (key == "sigma")
      model.kernel.sigma = value;
    else
      throw fail("unknown kernel parameter: " + key);
  }

  std::string bits;
  if (!(in >> word >> bits) || word != "mask") throw fail("expected mask line");
  if (bits != "-") {
    model.column_mask.reserve(bits.size());
    for (const char ch : bits) {
      if (ch != '0' && ch != '1') throw fail("mask must be a 0/1 string");
      model.column_mask.push_back(ch == '1' ? 1 : 0);
    }
  }

  std::size_t dim = 0, nsv = 0;
  int converged_flag = 1;
  if (!(in >> word >> model.bias) || word != "bias") throw fail("expected bias line");
  if (!(in >> word >> model.dual_objective) || word != "dual_objective")
    throw fail("expected dual_objective line");
  if (!(in >> word >> converged_flag) || word != "converged") throw fail("expected converged line");
  if (!(in >> word >> model.achieved_violation) || word != "violation")
    throw fail("expected violation line");
  if (!(in >> word >> dim) || word != "dim") throw fail("expected dim line");
  if (!(in >> word >> nsv) || word != "nsv") throw fail("expected nsv line");
  model.converged = converged_flag != 0;

  model.sv_rows = Matrix(nsv, dim);
  model.coeffs.resize(nsv);
  for (std::size_t v = 0; v < nsv; ++v) {
    if (!(in >> word) || word != "sv") throw fail("expected sv line " + std::to_string(v));
    if (!(in >> model.coeffs[v])) throw fail("truncated sv line");
    for (std::size_t cidx = 0; cidx < dim; ++cidx)
      if (!(in >> model.sv_rows(v, cidx))) throw fail("truncated sv line");
  }
  return model;
}

}  // namespace gsvma::svm
