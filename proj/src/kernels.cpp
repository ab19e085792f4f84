#include "gsvma/kernels.hpp"

#include <cmath>

namespace gsvma::kernels {

std::string family_name(Family family) {
  switch (family) {
    case Family::Linear: return "linear";
    case Family::Polynomial: return "polynomial";
    case Family::Rbf: return "rbf";
    case Family::Anova: return "anova";
  }
  throw InvalidConfig("unknown kernel family");
}

Family family_from_name(const std::string& name) {
  if (name == "linear") return Family::Linear;
  if (name == "polynomial" || name == "poly") return Family::Polynomial;
  if (name == "rbf") return Family::Rbf;
  if (name == "anova") return Family::Anova;
  throw InvalidConfig("unknown kernel family: " + name);
}

void KernelSpec::validate() const {
  if (family == Family::Polynomial || family == Family::Anova) {
    if (degree < 1) throw InvalidConfig("kernel degree must be a positive integer");
  }
  if (family == Family::Rbf && !(gamma > 0.0)) throw InvalidConfig("kernel gamma must be positive");
  if (family == Family::Anova && !(sigma > 0.0)) throw InvalidConfig("kernel sigma must be positive");
}

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * y[k];
  return acc;
}

// Integer power by repeated multiplication; bit-reproducible across libms.
double ipow(double base, int exponent) {
  double acc = 1.0;
  for (int i = 0; i < exponent; ++i) acc *= base;
  return acc;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw DimensionMismatch("kernel_eval: vectors must have equal nonzero dimension");
  switch (spec.family) {
    case Family::Linear:
      return dot(x, y);
    case Family::Polynomial:
      return ipow(1.0 + dot(x, y), spec.degree);
    case Family::Rbf: {
      double sq = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        sq += d * d;
      }
      return std::exp(-spec.gamma * sq);
    }
    case Family::Anova: {
      // exp(-s*d^2)^degree == exp(-s*degree*d^2); folding the exponent into
      // the argument keeps Anova(sigma, d) == Anova(d*sigma, 1) exact.
      const double rate = spec.sigma * static_cast<double>(spec.degree);
      double acc = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        acc += std::exp(-rate * d * d);
      }
      return acc;
    }
  }
  throw InvalidConfig("unknown kernel family");
}

Matrix gram(const KernelSpec& spec, const Matrix& rows) {
  if (rows.empty()) throw EmptyInput("gram: no rows");
  const std::size_t n = rows.rows();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel_eval(spec, rows.row(i), rows.row(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

}  // namespace gsvma::kernels
