#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "gani/error.hpp"
#include "gani/models.hpp"
#include "gani/random.hpp"
#include "gani/synthetic.hpp"
#include "support.hpp"

using namespace gani;

namespace {

double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

std::vector<NodeId> all_nodes(std::size_t n) {
  std::vector<NodeId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<NodeId>(i);
  return v;
}

// Two clusters in feature space, no edges.
Graph separable_edgeless(std::size_t per_class) {
  const std::size_t n = 2 * per_class;
  Matrix x(n, 4);
  std::vector<ClassId> labels(n);
  Rng rng = make_rng(17);
  for (std::size_t i = 0; i < n; ++i) {
    const bool second = i >= per_class;
    labels[i] = second ? 1 : 0;
    x(i, second ? 2 : 0) = 1.0 + uniform01(rng);
    x(i, second ? 3 : 1) = 0.5 * uniform01(rng);
  }
  return Graph::from_edges(n, {}, std::move(x), std::move(labels), 2, FeatureKind::continuous);
}

}  // namespace

TEST(SgcPropagate, ZeroHopsIsIdentity) {
  const Graph g = oracle::random_graph(6, 0.4, 3, 2, FeatureKind::binary, 1);
  EXPECT_EQ(sgc_propagate(normalize_adjacency(g), g.features(), 0), g.features());
}

TEST(SgcPropagate, IsolatedNodeUnchanged) {
  const Graph g = Graph::from_edges(1, {}, Matrix(1, 3, 0.7), {0}, 1, FeatureKind::continuous);
  EXPECT_EQ(sgc_propagate(normalize_adjacency(g), g.features(), 2), g.features());
}

TEST(SgcPropagate, MatchesDenseOracle) {
  const Graph g = oracle::random_graph(6, 0.4, 5, 2, FeatureKind::continuous, 2);
  const auto got = sgc_propagate(normalize_adjacency(g), g.features(), 2);
  const auto a = oracle::normalized(g);
  const auto want = oracle::matmul(a, oracle::matmul(a, oracle::from_matrix(g.features())));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(got(i, j), want[i][j], 1e-10);
}

TEST(SgcLogits, MatchDenseOracle) {
  const Graph g = oracle::random_graph(15, 0.25, 6, 3, FeatureKind::continuous, 3);
  SgcModel m;
  m.weights = oracle::random_matrix(6, 3, 4);
  const auto got = sgc_logits(m, normalize_adjacency(g), g.features());
  const auto want = oracle::sgc_logits(g, m.weights);
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(got(i, c), want[i][c], 1e-12);
}

TEST(SgcGradient, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Graph g = oracle::random_graph(10, 0.3, 5, 3, FeatureKind::continuous, seed);
    const auto prop = sgc_propagate(normalize_adjacency(g), g.features(), 2);
    const std::vector<NodeId> train = {0, 2, 3, 5, 8};
    Matrix w = oracle::random_matrix(5, 3, seed + 100, 0.5);
    const double wd = 5e-3;
    const auto lg = sgc_loss_and_gradient(prop, train, g.labels(), w, wd);
    const double h = 1e-6;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double keep = w.data()[i];
      w.data()[i] = keep + h;
      const double up = sgc_loss_and_gradient(prop, train, g.labels(), w, wd).loss;
      w.data()[i] = keep - h;
      const double down = sgc_loss_and_gradient(prop, train, g.labels(), w, wd).loss;
      w.data()[i] = keep;
      EXPECT_LT(rel_err(lg.grad.data()[i], (up - down) / (2 * h)), 1e-4) << "weight " << i;
    }
  }
}

TEST(GcnGradient, MatchesFiniteDifferencesWithAndWithoutDropout) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Graph g = oracle::random_graph(10, 0.3, 6, 3, FeatureKind::continuous, seed + 10);
    const auto a_hat = normalize_adjacency(g);
    const auto x = sparsify(g.features());
    const std::vector<NodeId> train = {1, 2, 4, 6, 7, 9};
    Matrix w1 = oracle::random_matrix(6, 4, seed + 200, 0.6);
    Matrix w2 = oracle::random_matrix(4, 3, seed + 300, 0.6);
    const double wd = 5e-3;

    DropoutMasks masks;
    Rng rng = make_rng(seed);
    for (std::size_t i = 0; i < x.nnz(); ++i) masks.input.push_back(bernoulli(rng, 0.5) ? 2.0 : 0.0);
    masks.hidden = Matrix(10, 4);
    for (double& v : masks.hidden.data()) v = bernoulli(rng, 0.5) ? 2.0 : 0.0;

    for (const DropoutMasks* mk : std::initializer_list<const DropoutMasks*>{nullptr, &masks}) {
      const auto lg = gcn_loss_and_gradient(a_hat, x, train, g.labels(), w1, w2, wd, mk);
      auto loss = [&] {
        return gcn_loss_and_gradient(a_hat, x, train, g.labels(), w1, w2, wd, mk).loss;
      };
      const double h = 1e-6;
      for (auto [w, grad] : {std::pair{&w1, &lg.grad_w1}, std::pair{&w2, &lg.grad_w2}}) {
        for (std::size_t i = 0; i < w->size(); ++i) {
          const double keep = w->data()[i];
          w->data()[i] = keep + h;
          const double up = loss();
          w->data()[i] = keep - h;
          const double down = loss();
          w->data()[i] = keep;
          EXPECT_LT(rel_err(grad->data()[i], (up - down) / (2 * h)), 1e-4);
        }
      }
    }
  }
}

TEST(TrainSgc, SeparableClustersOnEdgelessGraph) {
  const Graph g = separable_edgeless(10);
  const auto nodes = all_nodes(g.num_nodes());
  const DataSplit split{nodes, {}, {}};
  const SgcModel m = train_sgc(g, split, TrainConfig::sgc_defaults(1));
  EXPECT_DOUBLE_EQ(evaluate_accuracy(m, g, nodes), 1.0);
}

TEST(TrainSgc, ZeroFeaturesGiveUniformProbabilities) {
  const Graph g = Graph::from_edges(4, {}, Matrix(4, 3), {0, 1, 2, 0}, 3, FeatureKind::binary);
  const SgcModel m = train_sgc(g, {{0, 1, 2}, {}, {3}}, TrainConfig::sgc_defaults());
  const auto pred = predict(m, normalize_adjacency(g), g.features());
  for (double p : pred.probabilities.data()) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  for (ClassId c : pred.labels) EXPECT_EQ(c, 0);
}

TEST(TrainSgc, LossNeverIncreasesAndIsDeterministic) {
  SyntheticSpec spec;
  spec.num_nodes = 80;
  const Graph g = make_synthetic_graph(spec, 5);
  const DataSplit split{{0, 5, 10, 15, 20, 25, 30, 35}, {1, 6}, {2, 3, 4, 7, 8, 9}};
  TrainingTrace trace;
  const SgcModel a = train_sgc(g, split, TrainConfig::sgc_defaults(3), &trace);
  ASSERT_GE(trace.losses.size(), 2u);
  for (std::size_t i = 1; i < trace.losses.size(); ++i) {
    EXPECT_LE(trace.losses[i], trace.losses[i - 1]);
  }
  EXPECT_LT(trace.losses.back(), trace.losses.front());
  const SgcModel b = train_sgc(g, split, TrainConfig::sgc_defaults(3));
  EXPECT_EQ(a.weights, b.weights);
}

TEST(TrainSgc, RejectsEmptyTrainSet) {
  const Graph g = separable_edgeless(3);
  EXPECT_THROW(train_sgc(g, {{}, {}, {0}}, TrainConfig::sgc_defaults()), InvalidArgument);
}

TEST(Predict, RowsSumToOneAndShiftInvariant) {
  Matrix logits = oracle::random_matrix(20, 4, 6, 5.0);
  const auto p = softmax_predict(logits);
  for (std::size_t i = 0; i < 20; ++i) {
    double s = 0.0;
    for (double v : p.probabilities.row(i)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
  for (std::size_t i = 0; i < 20; ++i)
    for (double& v : logits.row(i)) v += static_cast<double>(i) * 3.7;
  EXPECT_EQ(softmax_predict(logits).labels, p.labels);
}

TEST(Predict, ZeroWeightsUniformAndTiesToLowest) {
  const Graph g = oracle::random_graph(5, 0.5, 3, 3, FeatureKind::binary, 7);
  SgcModel m;
  m.weights = Matrix(3, 3);
  const auto pred = predict(m, normalize_adjacency(g), g.features());
  for (double v : pred.probabilities.data()) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  for (ClassId c : pred.labels) EXPECT_EQ(c, 0);
  Matrix one_hot(1, 3);
  one_hot(0, 2) = 50.0;
  const auto q = softmax_predict(one_hot);
  EXPECT_EQ(q.labels[0], 2);
  EXPECT_GT(q.probabilities(0, 2), 0.999);
}

TEST(TrainGcn, OneHotLabelFeaturesOnEdgelessGraph) {
  const std::size_t n = 30;
  Matrix x(n, 3);
  std::vector<ClassId> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<ClassId>(i % 3);
    x(i, i % 3) = 1.0;
  }
  const Graph g = Graph::from_edges(n, {}, std::move(x), labels, 3, FeatureKind::binary);
  DataSplit split;
  for (NodeId i = 0; i < n; ++i) (i < 6 ? split.train : i < 9 ? split.val : split.test).push_back(i);
  const GcnModel m = train_gcn(g, split, TrainConfig::gcn_defaults(2));
  EXPECT_DOUBLE_EQ(evaluate_accuracy(m, g, split.test), 1.0);
}

TEST(TrainGcn, DeterministicGivenSeed) {
  const Graph g = make_synthetic_graph({}, 8);
  const DataSplit split{{0, 3, 6, 9, 12, 15}, {1, 4}, {2, 5, 8, 11, 14}};
  const GcnModel a = train_gcn(g, split, TrainConfig::gcn_defaults(4));
  const GcnModel b = train_gcn(g, split, TrainConfig::gcn_defaults(4));
  EXPECT_EQ(a.w1, b.w1);
  EXPECT_EQ(a.w2, b.w2);
}

TEST(Jaccard, IdenticalKeptDisjointRemoved) {
  Matrix x(3, 4);
  x(0, 0) = x(0, 1) = 1.0;
  x(1, 0) = x(1, 1) = 1.0;
  x(2, 2) = x(2, 3) = 1.0;
  const std::pair<NodeId, NodeId> edges[] = {{0, 1}, {1, 2}};
  const Graph g = Graph::from_edges(3, edges, std::move(x), {0, 0, 1}, 2, FeatureKind::binary);
  const Graph j = jaccard_preprocess(g);
  EXPECT_TRUE(j.has_edge(0, 1));
  EXPECT_FALSE(j.has_edge(1, 2));
}

TEST(Jaccard, MatchesPerEdgeOracleAndIsIdempotent) {
  for (const auto kind : {FeatureKind::binary, FeatureKind::continuous}) {
    const Graph g = oracle::random_graph(8, 0.5, 6, 2, kind, 12);
    const Graph j = jaccard_preprocess(g, 0.2);
    for (const auto& [u, v] : g.edge_list()) {
      const auto a = g.feature_row(u);
      const auto b = g.feature_row(v);
      double sim = 0.0;
      if (kind == FeatureKind::binary) {
        double inter = 0.0, uni = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          inter += (a[k] != 0.0 && b[k] != 0.0);
          uni += (a[k] != 0.0 || b[k] != 0.0);
        }
        sim = uni == 0.0 ? 0.0 : inter / uni;
      } else {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          dot += a[k] * b[k];
          na += a[k] * a[k];
          nb += b[k] * b[k];
        }
        sim = dot / std::sqrt(na * nb);
      }
      EXPECT_EQ(j.has_edge(u, v), sim > 0.2) << u << "-" << v;
    }
    EXPECT_EQ(jaccard_preprocess(j, 0.2), j);
  }
}

TEST(EvaluateAccuracy, Fractions) {
  const std::vector<ClassId> truth = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  std::vector<ClassId> pred = truth;
  const auto idx = all_nodes(10);
  EXPECT_DOUBLE_EQ(evaluate_accuracy(pred, truth, idx), 1.0);
  for (auto& c : pred) c = 1 - c;
  EXPECT_DOUBLE_EQ(evaluate_accuracy(pred, truth, idx), 0.0);
  pred = truth;
  pred[0] = pred[1] = pred[2] = 2;
  EXPECT_DOUBLE_EQ(evaluate_accuracy(pred, truth, idx), 0.7);
}

TEST(ModelFiles, RoundTripAndReject) {
  const auto dir = std::filesystem::temp_directory_path() / "gani_model_test";
  std::filesystem::create_directories(dir);
  SgcModel s;
  s.weights = oracle::random_matrix(4, 3, 1);
  s.seed = 99;
  save_model(dir / "s.bin", s);
  const SgcModel s2 = load_sgc_model(dir / "s.bin");
  EXPECT_EQ(s2.weights, s.weights);
  EXPECT_EQ(s2.seed, 99u);
  GcnModel g{oracle::random_matrix(4, 5, 2), oracle::random_matrix(5, 3, 3), 5, 7};
  save_model(dir / "g.bin", g);
  const GcnModel g2 = load_gcn_model(dir / "g.bin");
  EXPECT_EQ(g2.w1, g.w1);
  EXPECT_EQ(g2.w2, g.w2);
  EXPECT_THROW(load_gcn_model(dir / "s.bin"), Error);
  std::filesystem::remove_all(dir);
}
