#include "gsvma/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsvma::genetic {

namespace {

constexpr std::uint64_t kInitTag = 0x696E6974;      // population draw stream
constexpr std::uint64_t kSlotTag = 0x65766F6C;      // per-pair evolution streams

bool is_zero(const Mask& mask) {
  return std::all_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b == 0; });
}

std::size_t popcount(const Mask& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

Mask expand_genes(const Mask& genes, const std::vector<std::vector<std::size_t>>& groups,
                  std::size_t n_columns) {
  if (groups.empty()) return genes;
  Mask columns(n_columns, 0);
  for (std::size_t g = 0; g < genes.size(); ++g) {
    if (!genes[g]) continue;
    for (const std::size_t c : groups[g]) columns[c] = 1;
  }
  return columns;
}

}  // namespace

void GaConfig::validate() const {
  if (population_size < 2) throw InvalidConfig("ga: population size must be >= 2");
  if (generations < 1) throw InvalidConfig("ga: generations must be >= 1");
  if (selection != "roulette-wheel")
    throw InvalidConfig("ga: unsupported selection scheme '" + selection + "'");
  if (crossover_type != "shuffle")
    throw InvalidConfig("ga: unsupported crossover type '" + crossover_type + "'");
  if (crossover_p < 0.0 || crossover_p > 1.0) throw InvalidConfig("ga: crossover_p must be in [0,1]");
  if (mutation_p < 0.0 || mutation_p > 1.0) throw InvalidConfig("ga: mutation_p must be in [0,1]");
  if (elitism >= population_size) throw InvalidConfig("ga: elitism must be below population size");
  if (inner_cv_folds < 2) throw InvalidConfig("ga: inner_cv_folds must be >= 2");
  svm.validate();
}

GaConfig GaConfig::make_default() {
  GaConfig config;
  config.svm.kernel = kernels::KernelSpec::anova(1.0, 1);
  return config;
}

std::optional<double> FitnessCache::find(const Mask& mask) const {
  std::lock_guard lock(mu_);
  const auto it = map_.find(mask);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void FitnessCache::insert(const Mask& mask, double fitness) {
  std::lock_guard lock(mu_);
  map_.emplace(mask, fitness);
}

std::size_t FitnessCache::size() const {
  std::lock_guard lock(mu_);
  return map_.size();
}

std::vector<Chromosome> init_population(std::size_t length, const GaConfig& config, Rng& rng) {
  if (length == 0) throw InvalidConfig("init_population: chromosome length must be >= 1");
  std::vector<Chromosome> population(config.population_size);
  for (auto& individual : population) {
    individual.mask.resize(length);
    for (auto& bit : individual.mask) bit = rng.bernoulli(0.5) ? 1 : 0;
    if (is_zero(individual.mask)) individual.mask[rng.index(length)] = 1;
  }
  return population;
}

double fitness_eval(const Mask& mask, const dataset::EncodedDataset& data,
                    const dataset::FoldPlan& folds, const svm::SvmConfig& config) {
  if (is_zero(mask)) throw InvalidConfig("fitness_eval: mask selects no columns");
  const auto outcomes = eval::fold_outcomes(data, mask, folds, config, std::nullopt, 1);
  std::uint64_t correct = 0, total = 0;
  for (const auto& out : outcomes) {
    correct += out.cm.tp + out.cm.tn;
    total += out.cm.total();
  }
  if (total == 0) throw EmptyInput("fitness_eval: no fold produced predictions");
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::size_t roulette_select(std::span<const double> fitnesses, Rng& rng) {
  if (fitnesses.empty()) throw EmptyPopulation("roulette_select: empty fitness vector");
  double total = 0.0;
  for (const double f : fitnesses) {
    if (f < 0.0) throw InvalidConfig("roulette_select: fitnesses must be nonnegative");
    total += f;
  }
  if (total == 0.0) return rng.index(fitnesses.size());
  const double draw = rng.uniform() * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    cumulative += fitnesses[i];
    if (draw < cumulative) return i;
  }
  return fitnesses.size() - 1;
}

std::pair<Mask, Mask> two_point_crossover(const Mask& a, const Mask& b, std::size_t p1,
                                          std::size_t p2) {
  if (a.size() != b.size()) throw LengthMismatch("crossover: parents differ in length");
  if (p1 > p2 || p2 > a.size()) throw InvalidConfig("crossover: bad cut points");
  Mask child_a = a, child_b = b;
  for (std::size_t i = p1; i < p2; ++i) std::swap(child_a[i], child_b[i]);
  return {std::move(child_a), std::move(child_b)};
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& parent_a, const Chromosome& parent_b,
                                            const GaConfig& config, Rng& rng) {
  if (parent_a.mask.size() != parent_b.mask.size())
    throw LengthMismatch("crossover: parents differ in length");
  const std::size_t length = parent_a.mask.size();

  if (!rng.bernoulli(config.crossover_p)) return {parent_a, parent_b};

  // cut points 0 <= p1 < p2 <= L, uniform over distinct pairs
  std::size_t p1 = rng.index(length + 1);
  std::size_t p2 = rng.index(length + 1);
  while (p2 == p1) p2 = rng.index(length + 1);
  if (p1 > p2) std::swap(p1, p2);

  auto [mask_a, mask_b] = two_point_crossover(parent_a.mask, parent_b.mask, p1, p2);
  if (is_zero(mask_a)) mask_a[rng.index(length)] = 1;
  if (is_zero(mask_b)) mask_b[rng.index(length)] = 1;
  return {Chromosome{std::move(mask_a), std::nullopt}, Chromosome{std::move(mask_b), std::nullopt}};
}

Mask mutate_at(const Mask& mask, std::size_t bit) {
  if (bit >= mask.size()) throw InvalidConfig("mutate_at: bit out of range");
  Mask out = mask;
  out[bit] ^= 1;
  if (is_zero(out)) throw InvalidConfig("mutate_at: flip would zero the mask");
  return out;
}

Chromosome mutate(const Chromosome& chromosome, const GaConfig& config, Rng& rng) {
  if (is_zero(chromosome.mask)) throw InvalidConfig("mutate: mask selects no columns");
  if (!rng.bernoulli(config.mutation_p)) return chromosome;

  const std::size_t length = chromosome.mask.size();
  std::size_t bit = rng.index(length);
  if (popcount(chromosome.mask) == 1 && chromosome.mask[bit] == 1) {
    // flipping the only set bit is forbidden; choose among the others
    if (length == 1) return chromosome;
    std::size_t other = rng.index(length - 1);
    if (other >= bit) ++other;
    bit = other;
  }
  return {mutate_at(chromosome.mask, bit), std::nullopt};
}

GaResult run_ga(const dataset::EncodedDataset& data, const GaConfig& config) {
  config.validate();
  const std::size_t n_columns = data.n_columns();
  for (const auto& group : config.gene_groups)
    for (const std::size_t c : group)
      if (c >= n_columns) throw InvalidConfig("ga: gene group references a column out of range");
  const std::size_t length = config.gene_groups.empty() ? n_columns : config.gene_groups.size();

  const dataset::FoldPlan folds =
      dataset::stratified_kfold(data.labels, config.inner_cv_folds, config.fold_seed);

  Rng init_rng(mix_seed(config.seed, kInitTag));
  std::vector<Chromosome> population = init_population(length, config, init_rng);
  if (config.inject_full_mask) population.front() = {Mask(length, 1), std::nullopt};

  FitnessCache cache;
  GaResult result;
  result.history.records.reserve(config.generations);
  Chromosome best_ever;

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    // Resolve fitness for the whole generation. The cache scan is
    // sequential so evaluation/hit counts and results do not depend on the
    // worker count; only the unique new masks are trained, in parallel.
    std::vector<Mask> pending;
    for (auto& individual : population) {
      if (individual.fitness) continue;
      const Mask columns = expand_genes(individual.mask, config.gene_groups, n_columns);
      if (config.memoize) {
        if (const auto hit = cache.find(columns)) {
          individual.fitness = *hit;
          ++result.history.cache_hits;
          continue;
        }
        if (std::find(pending.begin(), pending.end(), columns) != pending.end()) {
          ++result.history.cache_hits;
          continue;
        }
      }
      pending.push_back(columns);
    }

    std::vector<double> computed(pending.size());
    parallel_for(pending.size(), config.threads, [&](std::size_t p) {
      computed[p] = fitness_eval(pending[p], data, folds, config.svm);
    });
    result.history.fitness_evaluations += pending.size();
    for (std::size_t p = 0; p < pending.size(); ++p) cache.insert(pending[p], computed[p]);

    for (auto& individual : population) {
      if (individual.fitness) continue;
      const Mask columns = expand_genes(individual.mask, config.gene_groups, n_columns);
      if (const auto value = cache.find(columns)) {
        individual.fitness = *value;
      } else {
        individual.fitness = fitness_eval(columns, data, folds, config.svm);  // memoize off
      }
    }

    // generation stats; ties resolve to the lower index
    std::size_t best_idx = 0;
    double mean = 0.0;
    for (std::size_t i = 0; i < population.size(); ++i) {
      mean += *population[i].fitness;
      if (*population[i].fitness > *population[best_idx].fitness) best_idx = i;
    }
    mean /= static_cast<double>(population.size());
    result.history.records.push_back({gen, *population[best_idx].fitness, mean,
                                      expand_genes(population[best_idx].mask, config.gene_groups,
                                                   n_columns)});
    if (config.on_generation) config.on_generation(result.history.records.back());
    if (!best_ever.fitness || *population[best_idx].fitness > *best_ever.fitness)
      best_ever = population[best_idx];

    if (gen + 1 == config.generations) break;

    // next generation: elites unchanged, the rest from roulette parents
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return *population[a].fitness > *population[b].fitness;
    });

    std::vector<double> fitnesses(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) fitnesses[i] = *population[i].fitness;

    std::vector<Chromosome> next;
    next.reserve(config.population_size);
    for (std::size_t e = 0; e < config.elitism; ++e) next.push_back(population[order[e]]);

    std::size_t slot = 0;
    while (next.size() < config.population_size) {
      Rng slot_rng(mix_seed(config.seed, mix_seed(kSlotTag + gen, slot)));
      ++slot;
      const std::size_t pa = roulette_select(fitnesses, slot_rng);
      const std::size_t pb = roulette_select(fitnesses, slot_rng);
      auto [child_a, child_b] = crossover(population[pa], population[pb], config, slot_rng);
      next.push_back(mutate(child_a, config, slot_rng));
      if (next.size() < config.population_size) next.push_back(mutate(child_b, config, slot_rng));
    }
    if (next.size() != config.population_size)
      throw Error("ga: population size drifted");  // unreachable by construction
    population = std::move(next);
  }

  result.best = best_ever;
  result.best_columns = expand_genes(best_ever.mask, config.gene_groups, n_columns);
  return result;
}

}  // namespace gsvma::genetic
