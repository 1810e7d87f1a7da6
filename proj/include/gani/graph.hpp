#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gani/matrix.hpp"

namespace gani {

using NodeId = std::uint32_t;
using ClassId = std::int32_t;

enum class FeatureKind { binary, continuous };

struct InjectionRecord;

// Undirected, unweighted attributed graph without self-loops.
//
// Nodes [0, num_original_nodes()) are the original graph; anything above was
// added by node injection. Neighbor lists are kept sorted, and since an
// injected node always takes the next free id, linking it only ever appends.
class Graph {
 public:
  Graph() = default;

  // Validates every invariant: no self-loops or duplicate edges, endpoints in
  // range, feature matrix has one row per node, labels in [0, num_classes),
  // binary features are 0/1 and no feature is negative or non-finite.
  static Graph from_edges(std::size_t num_nodes,
                          std::span<const std::pair<NodeId, NodeId>> edges,
                          Matrix features, std::vector<ClassId> labels,
                          std::size_t num_classes, FeatureKind kind,
                          std::size_t num_original_nodes);
  static Graph from_edges(std::size_t num_nodes,
                          std::span<const std::pair<NodeId, NodeId>> edges,
                          Matrix features, std::vector<ClassId> labels,
                          std::size_t num_classes, FeatureKind kind) {
    return from_edges(num_nodes, edges, std::move(features), std::move(labels),
                      num_classes, kind, num_nodes);
  }

  std::size_t num_nodes() const noexcept { return adjacency_.size(); }
  std::size_t num_original_nodes() const noexcept { return num_original_; }
  std::size_t num_edges() const noexcept { return num_edges_; }
  std::size_t num_features() const noexcept { return features_.cols(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  FeatureKind feature_kind() const noexcept { return kind_; }

  bool is_injected(NodeId v) const noexcept { return v >= num_original_; }

  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  bool has_edge(NodeId u, NodeId v) const;

  const Matrix& features() const noexcept { return features_; }
  std::span<const double> feature_row(NodeId v) const { return features_.row(v); }
  std::span<const ClassId> labels() const noexcept { return labels_; }
  ClassId label(NodeId v) const { return labels_[v]; }

  // Undirected edges as (u, v) with u < v, sorted.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend Graph inject_node(Graph, const InjectionRecord&);

  std::vector<std::vector<NodeId>> adjacency_;
  Matrix features_;
  std::vector<ClassId> labels_;
  std::size_t num_classes_ = 0;
  std::size_t num_edges_ = 0;
  std::size_t num_original_ = 0;
  FeatureKind kind_ = FeatureKind::binary;
};

struct DataSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;

  // Throws unless the parts are pairwise disjoint and every index < num_nodes.
  void validate(std::size_t num_nodes) const;

  friend bool operator==(const DataSplit&, const DataSplit&) = default;
};

// One fake node: its id, assigned label, generated features and the original
// nodes it links to.
struct InjectionRecord {
  NodeId injected_id = 0;
  ClassId assigned_label = 0;
  std::vector<double> feature_row;
  std::vector<NodeId> neighbors;

  friend bool operator==(const InjectionRecord&, const InjectionRecord&) = default;
};

// Â = D̃^{-1/2} (A + I) D̃^{-1/2}, with D̃ the degrees of A + I.
CsrMatrix normalize_adjacency(const Graph& g);

// Induced subgraph on the largest connected component (ties go to the
// component holding the smallest node id). Nodes keep their relative order;
// split indices are remapped and dropped nodes removed.
std::pair<Graph, DataSplit> largest_connected_component(const Graph& g,
                                                        const DataSplit& split);

// Appends `rec` as node g.num_nodes(). Only original nodes may be linked.
Graph inject_node(Graph g, const InjectionRecord& rec);

}  // namespace gani
