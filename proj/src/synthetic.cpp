#include "gani/synthetic.hpp"

#include <algorithm>

#include "gani/error.hpp"
#include "gani/random.hpp"

namespace gani {

Graph make_synthetic_graph(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.num_classes == 0 || spec.num_nodes < spec.num_classes) {
    throw InvalidArgument("synthetic graph needs at least one node per class");
  }
  if (spec.num_features < spec.num_classes || spec.mean_nonzeros == 0) {
    throw InvalidArgument("synthetic graph needs num_features >= num_classes and mean_nonzeros >= 1");
  }
  Rng rng = make_rng(seed);
  const std::size_t n = spec.num_nodes;

  std::vector<ClassId> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<ClassId>(v % spec.num_classes);
  shuffle(std::span<ClassId>(labels), rng);

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (bernoulli(rng, labels[u] == labels[v] ? spec.p_in : spec.p_out)) {
        edges.emplace_back(u, v);
      }
    }
  }

  const std::size_t block = spec.num_features / spec.num_classes;
  Matrix features(n, spec.num_features);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t count = 1 + uniform_index(rng, 2 * spec.mean_nonzeros - 1);
    const auto c = static_cast<std::size_t>(labels[v]);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = bernoulli(rng, spec.feature_signal)
                                ? c * block + uniform_index(rng, block)
                                : uniform_index(rng, spec.num_features);
      const double value = spec.kind == FeatureKind::binary ? 1.0 : 0.1 + 0.9 * uniform01(rng);
      features(v, j) = value;
    }
  }
  return Graph::from_edges(n, edges, std::move(features), std::move(labels), spec.num_classes,
                           spec.kind);
}

}  // namespace gani
