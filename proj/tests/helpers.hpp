#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsvma/common.hpp"
#include "gsvma/kernels.hpp"

namespace test_helpers {

inline gsvma::Matrix random_matrix(std::size_t rows, std::size_t cols, gsvma::Rng& rng,
                                   double lo = -1.0, double hi = 1.0) {
  gsvma::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  return m;
}

/// Random +/-1 labels with both classes guaranteed.
inline std::vector<int> random_labels(std::size_t n, gsvma::Rng& rng) {
  std::vector<int> y(n);
  for (auto& v : y) v = rng.bernoulli(0.5) ? 1 : -1;
  y[0] = 1;
  y[n - 1] = -1;
  return y;
}

inline gsvma::kernels::KernelSpec kernel_of(std::size_t which, gsvma::Rng& rng) {
  using gsvma::kernels::KernelSpec;
  switch (which % 4) {
    case 0: return KernelSpec::linear();
    case 1: return KernelSpec::polynomial(1 + static_cast<int>(rng.index(3)));
    case 2: return KernelSpec::rbf(rng.uniform(0.2, 2.0));
    default: return KernelSpec::anova(rng.uniform(0.2, 2.0), 1 + static_cast<int>(rng.index(3)));
  }
}

/// Mann-Whitney pair counting (ties get half credit); AUC oracle.
inline double pairwise_auc(std::span<const int> y, std::span<const double> scores) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] <= 0) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] > 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace test_helpers
