#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "gani/graph.hpp"
#include "gani/models.hpp"
#include "gani/random.hpp"
#include "gani/scoring.hpp"

namespace gani {

struct GaConfig {
  double candidate_rate = 0.5;   // α
  double crossover_rate = 0.5;   // p_c
  double mutation_rate = 0.3;    // p_m
  std::size_t population_size = 40;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 0;
  std::size_t workers = 1;  // fitness evaluation threads; never changes results

  void validate() const;
};

// One candidate neighbor set for the node being injected.
struct Individual {
  std::vector<NodeId> endpoints;
  std::optional<Fitness> fitness;

  friend bool operator==(const Individual&, const Individual&) = default;
};

using Population = std::vector<Individual>;

struct Candidate {
  NodeId node = 0;
  Fitness fitness;
};

struct GenerationStats {
  std::size_t generation = 0;
  Fitness best;  // best ever seen up to and including this generation
  double mean_misclassified = 0.0;
};

struct GaResult {
  Individual best;  // endpoints sorted ascending
  std::vector<Candidate> candidates;
  std::vector<GenerationStats> trace;
  std::size_t mutation_skips = 0;  // mutations with no spare candidate
};

// Stream ids for derive_seed, one per stochastic GA step.
enum class GaStream : std::uint64_t { init = 1, crossover = 2, mutation = 3, selection = 4 };

// Fitness of linking the injected node to its single endpoint, computed from
// scratch for `g`. Reference labels come from `source` on `g` itself.
Fitness score_single_link(const SgcModel& surrogate, const Graph& g,
                          const InjectionRecord& injected, const DataSplit& split,
                          LabelSource source);

// Drops original nodes whose reference label equals the injected label, scores
// the rest as single links, orders them by (misclassified desc, tdnh desc, id
// asc) and keeps the top ceil(alpha * remaining), but never fewer than
// min_keep (so a budget of k links can always be filled).
std::vector<Candidate> select_candidates(const InjectionScorer& scorer,
                                         std::span<const double> projected,
                                         ClassId injected_label, double alpha,
                                         std::size_t workers = 1,
                                         std::size_t min_keep = 1);

// pop_size individuals of k distinct candidates each, sampled uniformly
// without replacement.
Population init_population(std::span<const NodeId> candidates, std::size_t k,
                           std::size_t pop_size, Rng& rng);

// Pairs individuals after a shuffle; each pair swaps endpoint suffixes past a
// random cut with probability p_c. Endpoints duplicated by the swap are
// replaced with random unused candidates.
void crossover(Population& population, double p_c, std::span<const NodeId> candidates,
               Rng& rng);

// With probability p_m per individual, replaces one random endpoint by a
// random candidate it does not already hold. Returns how many selected
// individuals had no spare candidate and were left unchanged.
std::size_t mutate(Population& population, double p_m, std::span<const NodeId> candidates,
                   Rng& rng);

// Scores every individual that has no fitness yet.
void evaluate_fitness(Population& population, const InjectionScorer& scorer,
                      std::span<const double> projected, ClassId injected_label,
                      std::size_t workers = 1);

// Elitist size-2 tournament selection. The first best individual is copied
// through unchanged; exact ties are settled by a coin flip.
Population tournament_select(const Population& population, std::size_t pop_size, Rng& rng);

// Full neighbor search for one injected node.
GaResult run_ga(const InjectionScorer& scorer, std::span<const double> feature_row,
                ClassId injected_label, std::size_t k, const GaConfig& cfg);

// Convenience overload that builds the scorer for `g`.
GaResult run_ga(const SgcModel& surrogate, const Graph& g,
                std::span<const double> feature_row, ClassId injected_label,
                std::size_t k, const GaConfig& cfg, const DataSplit& split,
                LabelSource source);

// CSV: generation,best_misclassified,best_tdnh,mean_misclassified
void write_trace_csv(const std::filesystem::path& path,
                     std::span<const GenerationStats> trace);

}  // namespace gani
