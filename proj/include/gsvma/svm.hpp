#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gsvma/common.hpp"
#include "gsvma/kernels.hpp"

namespace gsvma::svm {

struct SvmConfig {
  double c = 1.0;
  kernels::KernelSpec kernel{};
  double tolerance = 1e-3;                 // working-pair KKT gap at which training stops
  std::uint64_t max_pair_updates = 10'000'000;
  std::size_t precompute_limit = 2048;     // full Gram at or below this many rows
  std::size_t cache_rows = 1024;           // kernel-row LRU capacity above the limit

  /// Diagnostics hook, called with the dual variables after every pair
  /// update. Leave empty for normal use.
  std::function<void(std::span<const double>)> on_pair_update;

  void validate() const;
};

struct KktReport {
  double max_violation = 0.0;      // worst margin-condition violation over all points
  double equality_residual = 0.0;  // |sum alpha_i y_i|
};

struct SvmModel {
  Matrix sv_rows;                        // support-vector feature rows
  std::vector<double> coeffs;            // alpha_i * y_i per support vector
  std::vector<std::size_t> sv_indices;   // training-set row of each support vector
  double bias = 0.0;
  kernels::KernelSpec kernel{};
  std::vector<std::uint8_t> column_mask; // feature subset the model was trained on; empty = all
  double dual_objective = 0.0;
  bool converged = true;
  double achieved_violation = 0.0;       // final working-pair gap

  std::size_t dim() const { return sv_rows.cols(); }
  friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

/// Soft-margin C-SVC trained by sequential minimal optimization with
/// maximal-violating-pair selection. Deterministic: identical inputs give
/// an identical model. If the pair-update budget runs out the model is
/// still returned, with converged = false and the gap it reached.
SvmModel train(const Matrix& rows, std::span<const int> labels, const SvmConfig& config);

/// sum_i coeffs_i * k(sv_i, x) + bias.
double decision_value(const SvmModel& model, std::span<const double> x);

/// Sign of the decision value; exactly zero maps to +1.
int predict(const SvmModel& model, std::span<const double> x);

/// Margin-form KKT check on the training set the model came from:
/// alpha == 0 needs margin >= 1, 0 < alpha < C needs margin == 1,
/// alpha == C needs margin <= 1; violations are distances past the bound.
KktReport check_kkt(const SvmModel& model, const Matrix& rows, std::span<const int> labels,
                    const SvmConfig& config);

/// sum alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j G_ij.
double dual_objective(std::span<const double> alphas, std::span<const int> labels,
                      const Matrix& gram);

/// Versioned text serialization (see README for the field-by-field format).
void save_model(std::ostream& out, const SvmModel& model);
SvmModel load_model(std::istream& in);

}  // namespace gsvma::svm
