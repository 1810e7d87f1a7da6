#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "gani/error.hpp"
#include "gani/pipeline.hpp"
#include "gani/synthetic.hpp"
#include "support.hpp"

using namespace gani;

namespace {

DataSplit split_for(std::size_t n) {
  DataSplit s;
  for (NodeId v = 0; v < n; ++v) {
    const auto bucket = v % 10;
    (bucket == 0 ? s.train : bucket == 1 ? s.val : s.test).push_back(v);
  }
  // Keep a few more training nodes so small graphs still train.
  for (NodeId v = 2; v < n; v += 10) {
    s.test.erase(std::find(s.test.begin(), s.test.end(), v));
    s.train.push_back(v);
  }
  std::sort(s.train.begin(), s.train.end());
  return s;
}

AttackConfig small_config(std::uint64_t seed) {
  AttackConfig cfg;
  cfg.seed = seed;
  cfg.ga.population_size = 10;
  cfg.ga.max_iterations = 8;
  cfg.victims = {};
  return cfg;
}

Graph synthetic(std::size_t n, std::uint64_t seed, FeatureKind kind = FeatureKind::binary) {
  SyntheticSpec spec;
  spec.num_nodes = n;
  spec.kind = kind;
  return make_synthetic_graph(spec, seed);
}

double frozen_accuracy(const SgcModel& surrogate, const Graph& g, const DataSplit& split) {
  return evaluate_accuracy(surrogate, g, split.test);
}

}  // namespace

TEST(InjectedNodeCount, RoundsHalfToEven) {
  EXPECT_EQ(injected_node_count(100, 0.05), 5u);
  EXPECT_EQ(injected_node_count(30, 0.05), 2u);   // 1.5
  EXPECT_EQ(injected_node_count(50, 0.05), 2u);   // 2.5
  EXPECT_EQ(injected_node_count(20, 0.05), 1u);
  EXPECT_THROW(injected_node_count(100, 0.0), InvalidArgument);
  EXPECT_THROW(injected_node_count(5, 0.05), InvalidArgument);
}

TEST(Names, RoundTrip) {
  for (Victim v : {Victim::gcn, Victim::sgc, Victim::jaccard_gcn}) {
    EXPECT_EQ(parse_victim(to_string(v)), v);
  }
  for (LabelSource s : {LabelSource::predicted, LabelSource::ground_truth}) {
    EXPECT_EQ(parse_label_source(to_string(s)), s);
  }
  EXPECT_THROW(parse_victim("gat"), InvalidArgument);
}

TEST(RunAttack, SingleInjection) {
  const Graph g = synthetic(40, 1);
  AttackConfig cfg = small_config(3);
  cfg.injection_ratio = 1.0 / 40.0;
  const auto r = run_attack(g, split_for(40), cfg);
  ASSERT_EQ(r.injections.size(), 1u);
  EXPECT_EQ(r.perturbed_graph.num_nodes(), 41u);
  EXPECT_EQ(r.injections[0].injected_id, 40u);
}

TEST(RunAttack, InvariantsHold) {
  for (const auto kind : {FeatureKind::binary, FeatureKind::continuous}) {
    for (const auto source : {LabelSource::predicted, LabelSource::ground_truth}) {
      const Graph g = synthetic(80, 2, kind);
      AttackConfig cfg = small_config(5);
      cfg.injection_ratio = 0.1;
      cfg.label_source = source;
      const DataSplit split = split_for(80);
      const auto r = run_attack(g, split, cfg);
      const Graph& p = r.perturbed_graph;

      ASSERT_EQ(r.injections.size(), 8u);
      EXPECT_EQ(p.num_nodes(), 88u);
      EXPECT_EQ(p.num_original_nodes(), 80u);
      EXPECT_EQ(original_subgraph(p), g);
      for (std::size_t i = 0; i < r.injections.size(); ++i) {
        const auto& rec = r.injections[i];
        EXPECT_EQ(rec.neighbors.size(), r.budget.link_budgets[i]);
        EXPECT_EQ(p.degree(rec.injected_id), rec.neighbors.size());
        for (NodeId v : rec.neighbors) EXPECT_LT(v, 80u);
        std::size_t nnz = 0;
        for (double x : rec.feature_row) {
          nnz += x != 0.0;
          if (kind == FeatureKind::binary) EXPECT_TRUE(x == 0.0 || x == 1.0);
        }
        EXPECT_EQ(nnz + r.feature_shortfalls[i], r.budget.feature_budget);
      }
      EXPECT_EQ(r.report.feature_range_violations, 0u);
      EXPECT_TRUE(r.report.injected_degree_membership);
      std::size_t clean_total = 0, perturbed_total = 0;
      for (const auto& [d, c] : r.report.clean_degree_histogram) clean_total += c;
      for (const auto& [d, c] : r.report.perturbed_degree_histogram) perturbed_total += c;
      EXPECT_EQ(clean_total, 80u);
      EXPECT_EQ(perturbed_total, 88u);
    }
  }
}

TEST(RunAttack, DeterministicPerSeed) {
  const Graph g = synthetic(60, 4);
  const DataSplit split = split_for(60);
  AttackConfig cfg = small_config(11);
  cfg.injection_ratio = 0.05;
  const auto a = run_attack(g, split, cfg);
  const auto b = run_attack(g, split, cfg);
  EXPECT_EQ(a.perturbed_graph, b.perturbed_graph);
  EXPECT_EQ(a.injections, b.injections);
  cfg.ga.workers = 3;
  EXPECT_EQ(run_attack(g, split, cfg).perturbed_graph, a.perturbed_graph);
  cfg.seed = 12;
  EXPECT_NE(run_attack(g, split, cfg).injections, a.injections);
}

TEST(RunAttack, BeatsRandomInjectionOnFrozenSurrogate) {
  SyntheticSpec spec;
  spec.num_nodes = 30;
  spec.num_classes = 3;
  spec.p_in = 0.3;
  spec.p_out = 0.03;
  double attacked = 0.0, random = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = make_synthetic_graph(spec, seed);
    DataSplit split{{0, 1, 2, 3, 4, 5, 6, 7, 8}, {9, 10, 11}, {}};
    for (NodeId v = 12; v < 30; ++v) split.test.push_back(v);
    AttackConfig cfg = small_config(seed);
    cfg.injection_ratio = 2.0 / 30.0;
    cfg.ga.population_size = 20;
    cfg.ga.max_iterations = 20;
    const auto r = run_attack(g, split, cfg);
    ASSERT_EQ(r.injections.size(), 2u);
    attacked += frozen_accuracy(r.surrogate, r.perturbed_graph, split);

    // Same labels, features and budgets, endpoints drawn at random.
    Rng rng = make_rng(seed + 1000);
    Graph p = g;
    for (const auto& rec : r.injections) {
      std::vector<NodeId> all(30);
      std::iota(all.begin(), all.end(), 0);
      shuffle(std::span<NodeId>(all), rng);
      std::vector<NodeId> ends(all.begin(), all.begin() + rec.neighbors.size());
      std::sort(ends.begin(), ends.end());
      p = inject_node(p, {rec.injected_id, rec.assigned_label, rec.feature_row, ends});
    }
    random += frozen_accuracy(r.surrogate, p, split);
  }
  EXPECT_LE(attacked, random);
}

TEST(EvaluatePoisoning, NoInjectionMeansNoChange) {
  const Graph g = synthetic(60, 6);
  const DataSplit split = split_for(60);
  for (Victim v : {Victim::gcn, Victim::sgc, Victim::jaccard_gcn}) {
    const auto acc = evaluate_poisoning(g, split, v, victim_train_config(v, 1));
    EXPECT_EQ(acc.clean, acc.poisoned);
  }
  const auto rep = imperceptibility_report(g, g);
  EXPECT_EQ(rep.clean_degree_histogram, rep.perturbed_degree_histogram);
  EXPECT_EQ(rep.feature_range_violations, 0u);
}

TEST(EvaluatePoisoning, ReproducesAttackNumbers) {
  const Graph g = synthetic(60, 7);
  const DataSplit split = split_for(60);
  AttackConfig cfg = small_config(2);
  cfg.victims = {Victim::sgc, Victim::gcn};
  const auto r = run_attack(g, split, cfg);
  ASSERT_EQ(r.accuracies.size(), 2u);
  for (const auto& acc : r.accuracies) {
    const auto again = evaluate_poisoning(
        r, split, acc.victim, victim_train_config(acc.victim, victim_seed(cfg.seed, acc.victim)));
    EXPECT_EQ(again.clean, acc.clean);
    EXPECT_EQ(again.poisoned, acc.poisoned);
  }
}

TEST(ImperceptibilityReport, FlagsOutOfRangeFeaturesAndDegrees) {
  const Graph g = oracle::random_graph(20, 0.2, 4, 2, FeatureKind::continuous, 3);
  std::vector<double> row(4, 0.0);
  row[0] = 1e6;
  const std::size_t cap = std::max<std::size_t>(1, max_link_budget(g));
  std::vector<NodeId> ends;
  for (NodeId v = 0; v <= cap && v < 20; ++v) ends.push_back(v);
  const Graph p = inject_node(g, {20, 0, row, ends});
  const auto rep = imperceptibility_report(g, p);
  EXPECT_EQ(rep.feature_range_violations, 1u);
  EXPECT_FALSE(rep.injected_degree_membership);
  EXPECT_DOUBLE_EQ(rep.features.injected_mean_nonzeros, 1.0);
}

TEST(RunAttack, RejectsBadConfig) {
  const Graph g = synthetic(40, 8);
  AttackConfig cfg = small_config(1);
  cfg.injection_ratio = 0.0;
  EXPECT_THROW(run_attack(g, split_for(40), cfg), InvalidArgument);
  cfg.injection_ratio = 0.05;
  cfg.ga.population_size = 1;
  EXPECT_THROW(run_attack(g, split_for(40), cfg), InvalidArgument);
}
