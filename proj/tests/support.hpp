#pragma once

// Independent reference implementations used as test oracles. Everything
// here works on plain dense std::vector matrices and recomputes from scratch,
// sharing no code paths with the library's sparse or incremental routines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "gani/graph.hpp"
#include "gani/matrix.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

inline Dense from_matrix(const gani::Matrix& m) {
  Dense out = zeros(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Dense out = zeros(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += a[i][t] * b[t][j];
      out[i][j] = s;
    }
  return out;
}

// Dense adjacency with 0/1 entries, rebuilt from has_edge queries.
inline Dense adjacency(const gani::Graph& g) {
  const std::size_t n = g.num_nodes();
  Dense a = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && g.has_edge(static_cast<gani::NodeId>(i), static_cast<gani::NodeId>(j)))
        a[i][j] = 1.0;
  return a;
}

// D^{-1/2} (A + I) D^{-1/2} straight from the definition.
inline Dense normalized(const Dense& adj) {
  const std::size_t n = adj.size();
  Dense a = adj;
  for (std::size_t i = 0; i < n; ++i) a[i][i] += 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] /= std::sqrt(deg[i]) * std::sqrt(deg[j]);
  return a;
}

inline Dense normalized(const gani::Graph& g) { return normalized(adjacency(g)); }

// Logits Â Â X W of an SGC model.
inline Dense sgc_logits(const gani::Graph& g, const gani::Matrix& w) {
  const Dense a = normalized(g);
  return matmul(a, matmul(a, matmul(from_matrix(g.features()), from_matrix(w))));
}

inline int argmax(const std::vector<double>& row) {
  int best = 0;
  for (std::size_t c = 1; c < row.size(); ++c)
    if (row[c] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

// Homophily of v counted neighbor by neighbor from the dense adjacency.
inline double homophily(const Dense& adj, const std::vector<int>& labels, std::size_t v) {
  double same = 0.0, total = 0.0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    if (adj[v][u] == 0.0) continue;
    total += 1.0;
    if (labels[u] == labels[v]) same += 1.0;
  }
  return total == 0.0 ? 0.0 : same / total;
}

struct Fitness {
  std::size_t misclassified = 0;
  double tdnh = 0.0;
};

// Builds the perturbed graph explicitly, recomputes every logit densely and
// recomputes each endpoint's homophily before and after the extra neighbor.
inline Fitness injection_fitness(const gani::Graph& g, const gani::Matrix& w,
                                 const std::vector<int>& reference,
                                 const std::vector<gani::NodeId>& test,
                                 const std::vector<double>& feature_row, int injected_label,
                                 const std::vector<gani::NodeId>& endpoints) {
  gani::InjectionRecord rec{static_cast<gani::NodeId>(g.num_nodes()), injected_label,
                            feature_row, endpoints};
  std::sort(rec.neighbors.begin(), rec.neighbors.end());
  const gani::Graph p = gani::inject_node(g, rec);
  const Dense logits = sgc_logits(p, w);
  Fitness f;
  for (const auto v : test) f.misclassified += argmax(logits[v]) != reference[v];

  const Dense before = adjacency(g);
  const Dense after = adjacency(p);
  std::vector<int> labels_after = reference;
  labels_after.resize(g.num_nodes());
  labels_after.push_back(injected_label);
  std::vector<gani::NodeId> sorted = endpoints;
  std::sort(sorted.begin(), sorted.end());
  for (const auto v : sorted) {
    double nb = 0.0;
    for (double x : before[v]) nb += x;
    if (nb == 0.0) continue;
    f.tdnh += homophily(before, reference, v) - homophily(after, labels_after, v);
  }
  return f;
}

inline bool better(const Fitness& a, const Fitness& b, double tol = 1e-12) {
  if (a.misclassified != b.misclassified) return a.misclassified > b.misclassified;
  return a.tdnh > b.tdnh + tol;
}

// Best injection fitness over every k-subset of original nodes whose
// reference label differs from `injected_label`.
inline Fitness brute_force_best(const gani::Graph& g, const gani::Matrix& w,
                                const std::vector<int>& reference,
                                const std::vector<gani::NodeId>& test,
                                const std::vector<double>& feature_row, int injected_label,
                                std::size_t k) {
  std::vector<gani::NodeId> pool;
  for (gani::NodeId v = 0; v < g.num_original_nodes(); ++v)
    if (reference[v] != injected_label) pool.push_back(v);
  Fitness best{0, -1.0};
  std::vector<gani::NodeId> pick(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == k) {
      const auto f = injection_fitness(g, w, reference, test, feature_row, injected_label, pick);
      if (better(f, best)) best = f;
      return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
      pick[depth] = pool[i];
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Erdos-Renyi graph with random sparse features and labels covering [0, C).
inline gani::Graph random_graph(std::size_t n, double p, std::size_t d, std::size_t classes,
                                gani::FeatureKind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<gani::NodeId, gani::NodeId>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (unit(rng) < p) edges.emplace_back(static_cast<gani::NodeId>(i), static_cast<gani::NodeId>(j));
  gani::Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (unit(rng) < 0.3) {
        x(i, j) = kind == gani::FeatureKind::binary ? 1.0 : 0.1 + unit(rng);
      }
    }
    if (std::all_of(x.row(i).begin(), x.row(i).end(), [](double v) { return v == 0.0; })) {
      x(i, i % d) = 1.0;
    }
  }
  std::vector<gani::ClassId> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i < classes ? static_cast<gani::ClassId>(i)
                            : static_cast<gani::ClassId>(rng() % classes);
  }
  return gani::Graph::from_edges(n, edges, std::move(x), std::move(labels), classes, kind);
}

inline gani::Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed,
                                  double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-scale, scale);
  gani::Matrix m(r, c);
  for (double& v : m.data()) v = unit(rng);
  return m;
}

}  // namespace oracle
