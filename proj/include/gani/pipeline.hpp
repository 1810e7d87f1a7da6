#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gani/budgets.hpp"
#include "gani/ga.hpp"
#include "gani/graph.hpp"
#include "gani/models.hpp"
#include "gani/scoring.hpp"

namespace gani {

enum class Victim { gcn, sgc, jaccard_gcn };

std::string to_string(Victim v);
Victim parse_victim(std::string_view name);
std::string to_string(LabelSource s);
LabelSource parse_label_source(std::string_view name);

struct AttackConfig {
  double injection_ratio = 0.05;
  GaConfig ga;
  LabelSource label_source = LabelSource::predicted;
  std::vector<Victim> victims = {Victim::gcn};
  std::uint64_t seed = 0;
  TrainConfig surrogate_train = TrainConfig::sgc_defaults();

  void validate() const;
};

// round(ratio * n), half to even. Throws unless the result is >= 1.
std::size_t injected_node_count(std::size_t num_nodes, double ratio);

struct VictimAccuracy {
  Victim victim = Victim::gcn;
  double clean = 0.0;
  double poisoned = 0.0;
};

struct FeatureStatistics {
  double clean_mean_nonzeros = 0.0;
  double injected_mean_nonzeros = 0.0;
  double clean_mean_value = 0.0;     // mean non-zero value
  double injected_mean_value = 0.0;
};

struct ImperceptibilityReport {
  std::map<std::size_t, std::size_t> clean_degree_histogram;
  std::map<std::size_t, std::size_t> perturbed_degree_histogram;
  std::size_t feature_range_violations = 0;
  bool injected_degree_membership = true;
  FeatureStatistics features;
};

struct AttackResult {
  Graph perturbed_graph;
  SgcModel surrogate;  // frozen clean-graph fit that guided every injection
  std::vector<InjectionRecord> injections;
  AttackBudget budget;
  std::vector<std::size_t> feature_shortfalls;  // per injection
  std::vector<std::vector<GenerationStats>> ga_traces;
  std::vector<VictimAccuracy> accuracies;
  ImperceptibilityReport report;
};

// Sequential node-injection attack: one frozen SGC surrogate trained on the
// clean graph guides every injection, and each GA round searches the graph
// with all earlier injections already in place. Victims listed in cfg are
// then retrained on clean and perturbed graphs.
AttackResult run_attack(const Graph& g, const DataSplit& split, const AttackConfig& cfg);

// Retraining seed of `victim` in an attack run with `attack_seed`. Depends on
// the victim kind only, so a later evaluation with a different victim list
// reproduces the same numbers.
std::uint64_t victim_seed(std::uint64_t attack_seed, Victim victim);

// Training config used for a victim retrained with `seed`.
TrainConfig victim_train_config(Victim victim, std::uint64_t seed);

// Original-node subgraph of a perturbed graph, i.e. the clean graph it came from.
Graph original_subgraph(const Graph& perturbed);

// Retrains `victim` from scratch on the clean graph (recovered from
// `perturbed`) and on `perturbed`, with the same split and config, and
// returns both test accuracies.
VictimAccuracy evaluate_poisoning(const Graph& perturbed, const DataSplit& split,
                                  Victim victim, const TrainConfig& train_cfg);
VictimAccuracy evaluate_poisoning(const AttackResult& result, const DataSplit& split,
                                  Victim victim, const TrainConfig& train_cfg);

ImperceptibilityReport imperceptibility_report(const Graph& clean, const Graph& perturbed);

}  // namespace gani
