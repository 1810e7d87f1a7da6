#include "gani/ga.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "gani/error.hpp"
#include "gani/parallel.hpp"
#include "gani/text.hpp"

namespace gani {

namespace {

bool contains(std::span<const NodeId> set, NodeId v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

std::vector<NodeId> spare_candidates(std::span<const NodeId> candidates,
                                     std::span<const NodeId> held) {
  std::vector<NodeId> out;
  for (const NodeId c : candidates) {
    if (!contains(held, c)) out.push_back(c);
  }
  return out;
}

Rng stream_rng(const GaConfig& cfg, GaStream stream, std::uint64_t generation) {
  return make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(stream), generation));
}

}  // namespace

void GaConfig::validate() const {
  if (!(candidate_rate > 0.0 && candidate_rate <= 1.0)) {
    throw InvalidArgument("candidate rate must be in (0, 1]");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw InvalidArgument("crossover rate must be in [0, 1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw InvalidArgument("mutation rate must be in [0, 1]");
  }
  if (population_size < 2) throw InvalidArgument("population size must be >= 2");
}

Fitness score_single_link(const SgcModel& surrogate, const Graph& g,
                          const InjectionRecord& injected, const DataSplit& split,
                          LabelSource source) {
  if (injected.neighbors.size() != 1) {
    throw InvalidArgument("score_single_link: expected exactly one endpoint");
  }
  const InjectionScorer scorer(g, surrogate, reference_labels(g, surrogate, source),
                               split.test);
  ScoringWorkspace ws(scorer);
  const auto projected = scorer.project(injected.feature_row);
  return scorer.score(projected, injected.assigned_label, injected.neighbors, ws);
}

std::vector<Candidate> select_candidates(const InjectionScorer& scorer,
                                         std::span<const double> projected,
                                         ClassId injected_label, double alpha,
                                         std::size_t workers, std::size_t min_keep) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must be in (0, 1]");
  const Graph& g = scorer.graph();
  const auto reference = scorer.reference();

  std::vector<Candidate> pool;
  for (NodeId v = 0; v < g.num_original_nodes(); ++v) {
    if (reference[v] != injected_label) pool.push_back({v, {}});
  }
  if (pool.empty()) {
    throw AttackError("every node carries label " + std::to_string(injected_label));
  }

  workers = std::max<std::size_t>(1, workers);
  std::vector<ScoringWorkspace> spaces;
  spaces.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) spaces.emplace_back(scorer);
  parallel_for(pool.size(), workers, [&](std::size_t i, std::size_t w) {
    const NodeId endpoint[] = {pool[i].node};
    pool[i].fitness = scorer.score(projected, injected_label, endpoint, spaces[w]);
  });

  std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (better(a.fitness, b.fitness)) return true;
    if (better(b.fitness, a.fitness)) return false;
    return a.node < b.node;
  });
  const auto keep = static_cast<std::size_t>(
      std::ceil(alpha * static_cast<double>(pool.size())));
  pool.resize(std::clamp<std::size_t>(std::max(keep, min_keep), 1, pool.size()));
  return pool;
}

Population init_population(std::span<const NodeId> candidates, std::size_t k,
                           std::size_t pop_size, Rng& rng) {
  if (candidates.size() < k) {
    throw AttackError("init_population: " + std::to_string(candidates.size()) +
                      " candidates for a link budget of " + std::to_string(k));
  }
  Population population(pop_size);
  std::vector<NodeId> pool(candidates.begin(), candidates.end());
  for (auto& ind : population) {
    // Partial Fisher-Yates: the first k slots become a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    ind.endpoints.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return population;
}

void crossover(Population& population, double p_c, std::span<const NodeId> candidates,
               Rng& rng) {
  std::vector<std::size_t> order(population.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(std::span<std::size_t>(order), rng);

  auto repair = [&](std::vector<NodeId>& endpoints, std::size_t cut) {
    for (std::size_t i = cut; i < endpoints.size(); ++i) {
      const std::span<const NodeId> prefix(endpoints.data(), cut);
      if (!contains(prefix, endpoints[i])) continue;
      const auto spares = spare_candidates(candidates, endpoints);
      endpoints[i] = spares[uniform_index(rng, spares.size())];
    }
  };

  for (std::size_t p = 0; p + 1 < order.size(); p += 2) {
    if (!bernoulli(rng, p_c)) continue;
    auto& a = population[order[p]];
    auto& b = population[order[p + 1]];
    const std::size_t k = a.endpoints.size();
    if (k == 0 || b.endpoints.size() != k) continue;
    const std::size_t cut = k == 1 ? 0 : 1 + uniform_index(rng, k - 1);
    if (std::equal(a.endpoints.begin() + static_cast<std::ptrdiff_t>(cut), a.endpoints.end(),
                   b.endpoints.begin() + static_cast<std::ptrdiff_t>(cut))) {
      continue;
    }
    std::swap_ranges(a.endpoints.begin() + static_cast<std::ptrdiff_t>(cut), a.endpoints.end(),
                     b.endpoints.begin() + static_cast<std::ptrdiff_t>(cut));
    repair(a.endpoints, cut);
    repair(b.endpoints, cut);
    a.fitness.reset();
    b.fitness.reset();
  }
}

std::size_t mutate(Population& population, double p_m, std::span<const NodeId> candidates,
                   Rng& rng) {
  std::size_t skipped = 0;
  for (auto& ind : population) {
    if (!bernoulli(rng, p_m) || ind.endpoints.empty()) continue;
    const auto spares = spare_candidates(candidates, ind.endpoints);
    if (spares.empty()) {
      ++skipped;
      continue;
    }
    const auto pos = uniform_index(rng, ind.endpoints.size());
    ind.endpoints[pos] = spares[uniform_index(rng, spares.size())];
    ind.fitness.reset();
  }
  return skipped;
}

void evaluate_fitness(Population& population, const InjectionScorer& scorer,
                      std::span<const double> projected, ClassId injected_label,
                      std::size_t workers) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!population[i].fitness) pending.push_back(i);
  }
  if (pending.empty()) return;
  workers = std::clamp<std::size_t>(workers, 1, pending.size());
  std::vector<ScoringWorkspace> spaces;
  spaces.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) spaces.emplace_back(scorer);
  parallel_for(pending.size(), workers, [&](std::size_t i, std::size_t w) {
    auto& ind = population[pending[i]];
    ind.fitness = scorer.score(projected, injected_label, ind.endpoints, spaces[w]);
  });
}

Population tournament_select(const Population& population, std::size_t pop_size, Rng& rng) {
  if (population.empty()) throw InvalidArgument("tournament_select: empty population");
  for (const auto& ind : population) {
    if (!ind.fitness) throw InvalidArgument("tournament_select: unevaluated individual");
  }
  std::size_t elite = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (better(*population[i].fitness, *population[elite].fitness)) elite = i;
  }
  Population next;
  next.reserve(pop_size);
  if (pop_size > 0) next.push_back(population[elite]);
  while (next.size() < pop_size) {
    const auto i = uniform_index(rng, population.size());
    const auto j = uniform_index(rng, population.size());
    const auto& fi = *population[i].fitness;
    const auto& fj = *population[j].fitness;
    std::size_t winner;
    if (better(fi, fj)) {
      winner = i;
    } else if (better(fj, fi)) {
      winner = j;
    } else {
      winner = bernoulli(rng, 0.5) ? i : j;
    }
    next.push_back(population[winner]);
  }
  return next;
}

GaResult run_ga(const InjectionScorer& scorer, std::span<const double> feature_row,
                ClassId injected_label, std::size_t k, const GaConfig& cfg) {
  cfg.validate();
  if (k == 0) throw InvalidArgument("run_ga: link budget must be >= 1");
  const auto projected = scorer.project(feature_row);

  GaResult result;
  result.candidates =
      select_candidates(scorer, projected, injected_label, cfg.candidate_rate, cfg.workers, k);
  std::vector<NodeId> candidates;
  candidates.reserve(result.candidates.size());
  for (const auto& c : result.candidates) candidates.push_back(c.node);

  Rng init_rng = stream_rng(cfg, GaStream::init, 0);
  Population population = init_population(candidates, k, cfg.population_size, init_rng);
  evaluate_fitness(population, scorer, projected, injected_label, cfg.workers);

  // A single-link individual is exactly one scored candidate, so for k = 1
  // the candidate ranking already holds the best individual seen.
  std::optional<Individual> best;
  if (k == 1) best = Individual{{result.candidates.front().node}, result.candidates.front().fitness};

  auto record = [&](std::size_t generation) {
    double total = 0.0;
    for (const auto& ind : population) {
      total += static_cast<double>(ind.fitness->misclassified);
      if (!best || better(*ind.fitness, *best->fitness)) best = ind;
    }
    result.trace.push_back(
        {generation, *best->fitness, total / static_cast<double>(population.size())});
  };
  record(0);

  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    Rng cross_rng = stream_rng(cfg, GaStream::crossover, t);
    Rng mut_rng = stream_rng(cfg, GaStream::mutation, t);
    Rng sel_rng = stream_rng(cfg, GaStream::selection, t);
    crossover(population, cfg.crossover_rate, candidates, cross_rng);
    result.mutation_skips += mutate(population, cfg.mutation_rate, candidates, mut_rng);
    evaluate_fitness(population, scorer, projected, injected_label, cfg.workers);
    record(t);
    population = tournament_select(population, cfg.population_size, sel_rng);
  }

  result.best = *best;
  std::sort(result.best.endpoints.begin(), result.best.endpoints.end());
  return result;
}

GaResult run_ga(const SgcModel& surrogate, const Graph& g,
                std::span<const double> feature_row, ClassId injected_label,
                std::size_t k, const GaConfig& cfg, const DataSplit& split,
                LabelSource source) {
  const InjectionScorer scorer(g, surrogate, reference_labels(g, surrogate, source),
                               split.test);
  return run_ga(scorer, feature_row, injected_label, k, cfg);
}

void write_trace_csv(const std::filesystem::path& path,
                     std::span<const GenerationStats> trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
  out << "generation,best_misclassified,best_tdnh,mean_misclassified\n";
  for (const auto& row : trace) {
    out << row.generation << ',' << row.best.misclassified << ','
        << format_double(row.best.tdnh) << ',' << format_double(row.mean_misclassified)
        << '\n';
  }
  if (!out) throw Error("io", "failed writing " + path.string());
}

}  // namespace gani
