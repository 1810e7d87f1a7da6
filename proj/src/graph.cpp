#include "gani/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gani/error.hpp"

namespace gani {

namespace {

void check_feature_row(std::span<const double> row, FeatureKind kind,
                       std::size_t node) {
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double x = row[j];
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidArgument("feature (" + std::to_string(node) + ", " +
                            std::to_string(j) + ") is negative or non-finite");
    }
    if (kind == FeatureKind::binary && x != 0.0 && x != 1.0) {
      throw InvalidArgument("feature (" + std::to_string(node) + ", " +
                            std::to_string(j) + ") is not 0/1 in a binary graph");
    }
  }
}

}  // namespace

Graph Graph::from_edges(std::size_t num_nodes,
                        std::span<const std::pair<NodeId, NodeId>> edges,
                        Matrix features, std::vector<ClassId> labels,
                        std::size_t num_classes, FeatureKind kind,
                        std::size_t num_original_nodes) {
  if (features.rows() != num_nodes) {
    throw InvalidArgument("feature matrix has " + std::to_string(features.rows()) +
                          " rows for " + std::to_string(num_nodes) + " nodes");
  }
  if (labels.size() != num_nodes) {
    throw InvalidArgument("label vector has " + std::to_string(labels.size()) +
                          " entries for " + std::to_string(num_nodes) + " nodes");
  }
  if (num_original_nodes > num_nodes) {
    throw InvalidArgument("num_original_nodes exceeds num_nodes");
  }
  for (std::size_t v = 0; v < num_nodes; ++v) {
    if (labels[v] < 0 || static_cast<std::size_t>(labels[v]) >= num_classes) {
      throw InvalidArgument("label of node " + std::to_string(v) +
                            " outside [0, " + std::to_string(num_classes) + ")");
    }
    check_feature_row(features.row(v), kind, v);
  }

  Graph g;
  g.adjacency_.resize(num_nodes);
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw InvalidArgument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") references a node out of range");
    }
    if (u == v) throw InvalidArgument("self-loop on node " + std::to_string(u));
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (std::size_t v = 0; v < num_nodes; ++v) {
    auto& nbrs = g.adjacency_[v];
    std::sort(nbrs.begin(), nbrs.end());
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
      throw InvalidArgument("duplicate edge at node " + std::to_string(v));
    }
  }
  g.num_edges_ = edges.size();
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  g.num_classes_ = num_classes;
  g.num_original_ = num_original_nodes;
  g.kind_ = kind;
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto& nbrs = adjacency_[u];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges_);
  for (NodeId u = 0; u < adjacency_.size(); ++u) {
    for (const NodeId v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

void DataSplit::validate(std::size_t num_nodes) const {
  std::vector<char> seen(num_nodes, 0);
  for (const auto* part : {&train, &val, &test}) {
    for (const NodeId v : *part) {
      if (v >= num_nodes) {
        throw InvalidArgument("split index " + std::to_string(v) + " out of range");
      }
      if (seen[v]) {
        throw InvalidArgument("split index " + std::to_string(v) + " appears twice");
      }
      seen[v] = 1;
    }
  }
}

CsrMatrix normalize_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (NodeId v = 0; v < n; ++v) {
    inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
  }

  CsrMatrix a;
  a.rows = a.cols = n;
  a.offsets.reserve(n + 1);
  a.indices.reserve(2 * g.num_edges() + n);
  a.values.reserve(2 * g.num_edges() + n);
  a.offsets.push_back(0);
  for (NodeId v = 0; v < n; ++v) {
    bool self_done = false;
    for (const NodeId u : g.neighbors(v)) {
      if (!self_done && u > v) {
        a.indices.push_back(v);
        a.values.push_back(inv_sqrt[v] * inv_sqrt[v]);
        self_done = true;
      }
      a.indices.push_back(u);
      a.values.push_back(inv_sqrt[v] * inv_sqrt[u]);
    }
    if (!self_done) {
      a.indices.push_back(v);
      a.values.push_back(inv_sqrt[v] * inv_sqrt[v]);
    }
    a.offsets.push_back(a.indices.size());
  }
  return a;
}

std::pair<Graph, DataSplit> largest_connected_component(const Graph& g,
                                                        const DataSplit& split) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw InvalidArgument("largest_connected_component: empty graph");

  constexpr NodeId kUnvisited = static_cast<NodeId>(-1);
  std::vector<NodeId> component(n, kUnvisited);
  std::vector<NodeId> stack;
  NodeId best_root = 0;
  std::size_t best_size = 0;
  for (NodeId root = 0; root < n; ++root) {
    if (component[root] != kUnvisited) continue;
    std::size_t size = 0;
    component[root] = root;
    stack.push_back(root);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      ++size;
      for (const NodeId u : g.neighbors(v)) {
        if (component[u] == kUnvisited) {
          component[u] = root;
          stack.push_back(u);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_root = root;
    }
  }

  std::vector<NodeId> remap(n, kUnvisited);
  std::vector<NodeId> kept;
  kept.reserve(best_size);
  for (NodeId v = 0; v < n; ++v) {
    if (component[v] == best_root) {
      remap[v] = static_cast<NodeId>(kept.size());
      kept.push_back(v);
    }
  }

  Matrix features(0, g.num_features());
  std::vector<ClassId> labels;
  labels.reserve(kept.size());
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::size_t original = 0;
  for (const NodeId v : kept) {
    features.append_row(g.feature_row(v));
    labels.push_back(g.label(v));
    if (!g.is_injected(v)) ++original;
    for (const NodeId u : g.neighbors(v)) {
      if (v < u) edges.emplace_back(remap[v], remap[u]);
    }
  }

  auto remap_part = [&](const std::vector<NodeId>& part) {
    std::vector<NodeId> out;
    for (const NodeId v : part) {
      if (v < n && remap[v] != kUnvisited) out.push_back(remap[v]);
    }
    return out;
  };
  DataSplit sub{remap_part(split.train), remap_part(split.val), remap_part(split.test)};

  // Injected nodes always trail original ones, so the prefix property holds.
  return {Graph::from_edges(kept.size(), edges, std::move(features), std::move(labels),
                            g.num_classes(), g.feature_kind(), original),
          std::move(sub)};
}

Graph inject_node(Graph g, const InjectionRecord& rec) {
  const auto id = static_cast<NodeId>(g.num_nodes());
  if (rec.injected_id != id) {
    throw InvalidArgument("inject_node: record id " + std::to_string(rec.injected_id) +
                          " but next free id is " + std::to_string(id));
  }
  if (rec.feature_row.size() != g.num_features()) {
    throw InvalidArgument("inject_node: feature row has " +
                          std::to_string(rec.feature_row.size()) + " entries, expected " +
                          std::to_string(g.num_features()));
  }
  if (rec.assigned_label < 0 ||
      static_cast<std::size_t>(rec.assigned_label) >= g.num_classes()) {
    throw InvalidArgument("inject_node: assigned label out of range");
  }
  check_feature_row(rec.feature_row, g.feature_kind(), id);

  std::vector<NodeId> nbrs = rec.neighbors;
  std::sort(nbrs.begin(), nbrs.end());
  if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
    throw InvalidArgument("inject_node: duplicate neighbor");
  }
  for (const NodeId u : nbrs) {
    if (u >= id) {
      throw InvalidArgument("inject_node: neighbor " + std::to_string(u) + " out of range");
    }
    if (g.is_injected(u)) {
      throw InvalidArgument("inject_node: neighbor " + std::to_string(u) +
                            " is an injected node");
    }
  }

  for (const NodeId u : nbrs) g.adjacency_[u].push_back(id);
  g.adjacency_.push_back(std::move(nbrs));
  g.num_edges_ += rec.neighbors.size();
  g.features_.append_row(rec.feature_row);
  g.labels_.push_back(rec.assigned_label);
  return g;
}

}  // namespace gani
