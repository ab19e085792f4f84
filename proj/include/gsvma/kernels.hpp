#pragma once

#include <span>
#include <string>

#include "gsvma/common.hpp"

namespace gsvma::kernels {

enum class Family { Linear, Polynomial, Rbf, Anova };

std::string family_name(Family family);
Family family_from_name(const std::string& name);  // throws InvalidConfig

/// Kernel family plus hyperparameters. degree applies to Polynomial and
/// Anova, gamma to Rbf, sigma to Anova.
struct KernelSpec {
  Family family = Family::Linear;
  int degree = 1;
  double gamma = 1.0;
  double sigma = 1.0;

  void validate() const;  // throws InvalidConfig

  static KernelSpec linear() { return {Family::Linear, 1, 1.0, 1.0}; }
  static KernelSpec polynomial(int degree) { return {Family::Polynomial, degree, 1.0, 1.0}; }
  static KernelSpec rbf(double gamma) { return {Family::Rbf, 1, gamma, 1.0}; }
  static KernelSpec anova(double sigma, int degree) { return {Family::Anova, degree, 1.0, sigma}; }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Evaluates k(x, y):
///   Linear      <x, y>
///   Polynomial  (1 + <x, y>)^degree
///   Rbf         exp(-gamma * ||x - y||^2)
///   Anova       sum_k exp(-sigma * (x_k - y_k)^2)^degree, exponent per term
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// G[i][j] = k(row_i, row_j). Each pair is evaluated once and mirrored, so
/// the result is exactly symmetric.
Matrix gram(const KernelSpec& spec, const Matrix& rows);

}  // namespace gsvma::kernels
