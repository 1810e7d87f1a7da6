#include "gani/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gani/error.hpp"
#include "gani/featuregen.hpp"
#include "gani/random.hpp"

namespace gani {

namespace {

// derive_seed stream ids for the attack driver.
enum Stream : std::uint64_t {
  surrogate_stream = 101,
  budget_stream = 102,
  label_stream = 103,
  ga_stream = 104,
  victim_stream = 105,
};

std::size_t count_other_labels(std::span<const ClassId> reference, std::size_t n_orig,
                               ClassId label) {
  std::size_t count = 0;
  for (std::size_t v = 0; v < n_orig; ++v) count += reference[v] != label;
  return count;
}

bool has_member(std::span<const ClassId> reference, std::size_t n_orig, ClassId label) {
  for (std::size_t v = 0; v < n_orig; ++v) {
    if (reference[v] == label) return true;
  }
  return false;
}

// Draws L' for one injection. A label is rejected when no original node
// carries it (no features to imitate) or fewer than k original nodes carry
// another label (no room for k links).
ClassId pick_injected_label(std::span<const ClassId> reference, std::size_t n_orig,
                            std::size_t num_classes, std::size_t k, Rng& rng) {
  for (std::size_t attempt = 0; attempt <= num_classes; ++attempt) {
    const auto label = static_cast<ClassId>(uniform_index(rng, num_classes));
    if (has_member(reference, n_orig, label) &&
        count_other_labels(reference, n_orig, label) >= k) {
      return label;
    }
  }
  throw AttackError("no usable label for the injected node after " +
                    std::to_string(num_classes + 1) + " draws");
}

std::map<std::size_t, std::size_t> degree_histogram(const Graph& g) {
  std::map<std::size_t, std::size_t> hist;
  for (NodeId v = 0; v < g.num_nodes(); ++v) ++hist[g.degree(v)];
  return hist;
}

}  // namespace

std::string to_string(Victim v) {
  switch (v) {
    case Victim::gcn: return "gcn";
    case Victim::sgc: return "sgc";
    case Victim::jaccard_gcn: return "jaccard_gcn";
  }
  return "unknown";
}

Victim parse_victim(std::string_view name) {
  if (name == "gcn") return Victim::gcn;
  if (name == "sgc") return Victim::sgc;
  if (name == "jaccard_gcn" || name == "jaccard") return Victim::jaccard_gcn;
  throw InvalidArgument("unknown victim '" + std::string(name) + "'");
}

std::string to_string(LabelSource s) {
  return s == LabelSource::predicted ? "predicted" : "ground_truth";
}

LabelSource parse_label_source(std::string_view name) {
  if (name == "predicted") return LabelSource::predicted;
  if (name == "ground_truth") return LabelSource::ground_truth;
  throw InvalidArgument("unknown label source '" + std::string(name) + "'");
}

void AttackConfig::validate() const {
  if (!(injection_ratio > 0.0 && injection_ratio <= 1.0)) {
    throw InvalidArgument("injection ratio must be in (0, 1]");
  }
  ga.validate();
  surrogate_train.validate();
}

std::size_t injected_node_count(std::size_t num_nodes, double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw InvalidArgument("injection ratio must be positive");
  }
  const double raw = std::nearbyint(ratio * static_cast<double>(num_nodes));
  if (raw < 1.0) {
    throw InvalidArgument("injection ratio " + std::to_string(ratio) + " on " +
                          std::to_string(num_nodes) + " nodes injects no node");
  }
  return static_cast<std::size_t>(raw);
}

std::uint64_t victim_seed(std::uint64_t attack_seed, Victim victim) {
  return derive_seed(attack_seed, victim_stream, static_cast<std::uint64_t>(victim));
}

TrainConfig victim_train_config(Victim victim, std::uint64_t seed) {
  return victim == Victim::sgc ? TrainConfig::sgc_defaults(seed)
                               : TrainConfig::gcn_defaults(seed);
}

Graph original_subgraph(const Graph& perturbed) {
  const std::size_t n = perturbed.num_original_nodes();
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& [u, v] : perturbed.edge_list()) {
    if (u < n && v < n) edges.emplace_back(u, v);
  }
  Matrix x(n, perturbed.num_features());
  for (NodeId v = 0; v < n; ++v) {
    std::copy_n(perturbed.feature_row(v).begin(), x.cols(), x.row(v).begin());
  }
  const auto labels = perturbed.labels();
  return Graph::from_edges(n, edges, std::move(x),
                           std::vector<ClassId>(labels.begin(), labels.begin() + n),
                           perturbed.num_classes(), perturbed.feature_kind());
}

namespace {

double victim_accuracy(const Graph& g, const DataSplit& split, Victim victim,
                       const TrainConfig& cfg) {
  switch (victim) {
    case Victim::sgc:
      return evaluate_accuracy(train_sgc(g, split, cfg), g, split.test);
    case Victim::gcn:
      return evaluate_accuracy(train_gcn(g, split, cfg), g, split.test);
    case Victim::jaccard_gcn: {
      const Graph cleaned = jaccard_preprocess(g);
      return evaluate_accuracy(train_gcn(cleaned, split, cfg), cleaned, split.test);
    }
  }
  throw InvalidArgument("unknown victim");
}

}  // namespace

VictimAccuracy evaluate_poisoning(const Graph& perturbed, const DataSplit& split,
                                  Victim victim, const TrainConfig& train_cfg) {
  split.validate(perturbed.num_original_nodes());
  const Graph clean = original_subgraph(perturbed);
  return {victim, victim_accuracy(clean, split, victim, train_cfg),
          victim_accuracy(perturbed, split, victim, train_cfg)};
}

VictimAccuracy evaluate_poisoning(const AttackResult& result, const DataSplit& split,
                                  Victim victim, const TrainConfig& train_cfg) {
  return evaluate_poisoning(result.perturbed_graph, split, victim, train_cfg);
}

ImperceptibilityReport imperceptibility_report(const Graph& clean, const Graph& perturbed) {
  if (clean.num_nodes() != perturbed.num_original_nodes() ||
      clean.num_features() != perturbed.num_features()) {
    throw InvalidArgument("perturbed graph does not extend the clean graph");
  }
  ImperceptibilityReport report;
  report.clean_degree_histogram = degree_histogram(clean);
  report.perturbed_degree_histogram = degree_histogram(perturbed);

  const std::size_t d = clean.num_features();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(d, inf), hi(d, -inf);
  std::size_t clean_nnz = 0;
  double clean_sum = 0.0;
  for (NodeId v = 0; v < clean.num_nodes(); ++v) {
    const auto row = clean.feature_row(v);
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] == 0.0) continue;
      lo[j] = std::min(lo[j], row[j]);
      hi[j] = std::max(hi[j], row[j]);
      ++clean_nnz;
      clean_sum += row[j];
    }
  }

  std::size_t cap = std::max<std::size_t>(1, max_link_budget(clean));
  std::vector<char> allowed_degree(cap + 1, 0);
  for (NodeId v = 0; v < clean.num_nodes(); ++v) {
    allowed_degree[clamp_budget(clean.degree(v), cap)] = 1;
  }

  const std::size_t n_in = perturbed.num_nodes() - clean.num_nodes();
  std::size_t injected_nnz = 0;
  double injected_sum = 0.0;
  for (NodeId u = static_cast<NodeId>(clean.num_nodes()); u < perturbed.num_nodes(); ++u) {
    const auto row = perturbed.feature_row(u);
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] == 0.0) continue;
      ++injected_nnz;
      injected_sum += row[j];
      if (row[j] < lo[j] || row[j] > hi[j]) ++report.feature_range_violations;
    }
    const std::size_t deg = perturbed.degree(u);
    if (deg >= allowed_degree.size() || !allowed_degree[deg]) {
      report.injected_degree_membership = false;
    }
  }

  auto& f = report.features;
  f.clean_mean_nonzeros =
      clean.num_nodes() ? static_cast<double>(clean_nnz) / static_cast<double>(clean.num_nodes())
                        : 0.0;
  f.clean_mean_value = clean_nnz ? clean_sum / static_cast<double>(clean_nnz) : 0.0;
  f.injected_mean_nonzeros =
      n_in ? static_cast<double>(injected_nnz) / static_cast<double>(n_in) : 0.0;
  f.injected_mean_value = injected_nnz ? injected_sum / static_cast<double>(injected_nnz) : 0.0;
  return report;
}

AttackResult run_attack(const Graph& g, const DataSplit& split, const AttackConfig& cfg) {
  cfg.validate();
  if (g.num_original_nodes() != g.num_nodes()) {
    throw InvalidArgument("run_attack expects a graph without injected nodes");
  }
  split.validate(g.num_nodes());
  if (split.train.empty()) throw InvalidArgument("empty training split");
  if (split.test.empty()) throw InvalidArgument("empty test split");

  TrainConfig surrogate_cfg = cfg.surrogate_train;
  surrogate_cfg.seed = derive_seed(cfg.seed, surrogate_stream, 0);
  const SgcModel surrogate = train_sgc(g, split, surrogate_cfg);

  std::vector<ClassId> reference = reference_labels(g, surrogate, cfg.label_source);
  const std::size_t n_orig = g.num_nodes();
  const std::size_t n_in = injected_node_count(n_orig, cfg.injection_ratio);

  AttackResult result{g, surrogate, {}, {}, {}, {}, {}, {}};
  result.budget.feature_budget = feature_budget(g);
  result.budget.link_budgets =
      sample_link_budgets(g, n_in, derive_seed(cfg.seed, budget_stream, 0));

  Graph current = g;
  for (std::size_t i = 0; i < n_in; ++i) {
    const std::size_t k = result.budget.link_budgets[i];
    Rng label_rng = make_rng(derive_seed(cfg.seed, label_stream, i));
    const ClassId label =
        pick_injected_label(reference, n_orig, g.num_classes(), k, label_rng);
    const auto generated =
        generate_features(g, reference, label, result.budget.feature_budget);

    GaConfig ga_cfg = cfg.ga;
    ga_cfg.seed = derive_seed(cfg.seed, ga_stream, i);
    const InjectionScorer scorer(current, surrogate, reference, split.test);
    GaResult ga = run_ga(scorer, generated.row, label, k, ga_cfg);

    InjectionRecord rec{static_cast<NodeId>(current.num_nodes()), label, generated.row,
                        ga.best.endpoints};
    current = inject_node(std::move(current), rec);
    reference.push_back(label);

    result.injections.push_back(std::move(rec));
    result.feature_shortfalls.push_back(generated.shortfall);
    result.ga_traces.push_back(std::move(ga.trace));
  }
  result.perturbed_graph = std::move(current);
  result.report = imperceptibility_report(g, result.perturbed_graph);

  for (const Victim victim : cfg.victims) {
    result.accuracies.push_back(
        evaluate_poisoning(result.perturbed_graph, split, victim,
                           victim_train_config(victim, victim_seed(cfg.seed, victim))));
  }
  return result;
}

}  // namespace gani
