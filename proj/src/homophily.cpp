#include "gani/homophily.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "gani/error.hpp"

namespace gani {

namespace {

std::size_t same_label_neighbors(const Graph& g, std::span<const ClassId> labels,
                                 NodeId v) {
  std::size_t same = 0;
  for (const NodeId u : g.neighbors(v)) {
    if (labels[u] == labels[v]) ++same;
  }
  return same;
}

void check_labels(const Graph& g, std::span<const ClassId> labels) {
  if (labels.size() < g.num_nodes()) {
    throw InvalidArgument("homophily: " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(g.num_nodes()) + " nodes");
  }
}

}  // namespace

double node_homophily(const Graph& g, std::span<const ClassId> labels, NodeId v) {
  check_labels(g, labels);
  const std::size_t deg = g.degree(v);
  if (deg == 0) {
    throw InvalidArgument("node_homophily: node " + std::to_string(v) + " is isolated");
  }
  return static_cast<double>(same_label_neighbors(g, labels, v)) /
         static_cast<double>(deg);
}

double average_homophily(const Graph& g, std::span<const ClassId> labels) {
  check_labels(g, labels);
  double total = 0.0;
  std::size_t counted = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const std::size_t deg = g.degree(v);
    if (deg == 0) continue;
    total += static_cast<double>(same_label_neighbors(g, labels, v)) /
             static_cast<double>(deg);
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

double dnh(const Graph& g, std::span<const ClassId> labels, NodeId v,
           ClassId injected_label) {
  check_labels(g, labels);
  const std::size_t deg = g.degree(v);
  if (deg == 0) return 0.0;
  // s/d - (s+δ)/(d+1) as one rational, so equal drops give equal doubles.
  const auto same = static_cast<long long>(same_label_neighbors(g, labels, v));
  const auto d = static_cast<long long>(deg);
  const long long delta = injected_label == labels[v] ? 1 : 0;
  return static_cast<double>(same - delta * d) / static_cast<double>(d * (d + 1));
}

double tdnh(const Graph& g, std::span<const ClassId> labels,
            std::span<const NodeId> endpoints, ClassId injected_label) {
  std::vector<NodeId> sorted(endpoints.begin(), endpoints.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("tdnh: endpoints must be distinct");
  }
  // Summed in ascending node order so the result is independent of how the
  // caller ordered the endpoints.
  double total = 0.0;
  for (const NodeId v : sorted) total += dnh(g, labels, v, injected_label);
  return total;
}

}  // namespace gani
