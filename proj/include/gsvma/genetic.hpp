#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "gsvma/dataset.hpp"
#include "gsvma/eval.hpp"
#include "gsvma/svm.hpp"

namespace gsvma::genetic {

struct EmptyPopulation : Error {
  using Error::Error;
};

using Mask = std::vector<std::uint8_t>;

struct Chromosome {
  Mask mask;
  std::optional<double> fitness;
  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

struct GenerationRecord {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  Mask best_mask;  // column space
  friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

struct GaConfig {
  std::size_t population_size = 50;
  std::size_t generations = 10;
  std::string selection = "roulette-wheel";  // the only supported scheme
  std::string crossover_type = "shuffle";    // two-point crossover
  double crossover_p = 0.75;
  double mutation_p = 1.0;
  std::size_t elitism = 1;
  std::uint64_t seed = 1;
  int inner_cv_folds = 10;
  std::uint64_t fold_seed = 0;      // seed of the frozen fitness fold plan
  bool inject_full_mask = true;     // force one initial individual to all-ones
  bool memoize = true;
  std::size_t threads = 1;
  svm::SvmConfig svm{};             // ANOVA kernel by default (see make_default)

  /// Raw-gene compatibility mode: gene g toggles the listed encoded
  /// columns. Empty means one gene per encoded column.
  std::vector<std::vector<std::size_t>> gene_groups;

  /// Called after each generation is recorded; lets callers keep a partial
  /// history for diagnosis when a later generation fails.
  std::function<void(const GenerationRecord&)> on_generation;

  void validate() const;
  static GaConfig make_default();
};

struct GaHistory {
  std::vector<GenerationRecord> records;
  std::uint64_t fitness_evaluations = 0;  // unique masks actually trained
  std::uint64_t cache_hits = 0;
  friend bool operator==(const GaHistory&, const GaHistory&) = default;
};

struct GaResult {
  Chromosome best;             // gene space
  Mask best_columns;           // expanded to encoded columns
  GaHistory history;
};

/// Thread-safe mask -> fitness memo.
class FitnessCache {
 public:
  std::optional<double> find(const Mask& mask) const;
  void insert(const Mask& mask, double fitness);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<Mask, double> map_;
};

/// population_size chromosomes of length L, each bit Bernoulli(1/2);
/// all-zero masks are repaired with one random bit.
std::vector<Chromosome> init_population(std::size_t length, const GaConfig& config, Rng& rng);

/// Pooled k-fold accuracy of an SVM trained on the masked columns only.
/// The dataset is used as given (normalize beforehand).
double fitness_eval(const Mask& mask, const dataset::EncodedDataset& data,
                    const dataset::FoldPlan& folds, const svm::SvmConfig& config);

/// Fitness-proportionate index draw: P_i = f_i / sum f_k, uniform when the
/// total is zero.
std::size_t roulette_select(std::span<const double> fitnesses, Rng& rng);

/// Two-point crossover at fixed cuts 0 <= p1 < p2 <= L: the middle segment
/// is swapped between the parents.
std::pair<Mask, Mask> two_point_crossover(const Mask& a, const Mask& b, std::size_t p1,
                                          std::size_t p2);

/// With probability crossover_p, swap a random middle segment; otherwise
/// copy the parents. All-zero children get one random bit set.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& parent_a, const Chromosome& parent_b,
                                            const GaConfig& config, Rng& rng);

/// Flip of one chosen bit, rejecting a flip that would zero the mask.
Mask mutate_at(const Mask& mask, std::size_t bit);

/// With probability mutation_p, flip one uniformly chosen bit (never
/// zeroing the mask).
Chromosome mutate(const Chromosome& chromosome, const GaConfig& config, Rng& rng);

/// Generational GA with elitism over a frozen fold plan. Deterministic for
/// a fixed seed regardless of the thread count.
GaResult run_ga(const dataset::EncodedDataset& data, const GaConfig& config);

}  // namespace gsvma::genetic
