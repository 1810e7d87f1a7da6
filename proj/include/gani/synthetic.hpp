#pragma once

#include <cstdint>

#include "gani/graph.hpp"

namespace gani {

// Planted-partition graph with class-correlated sparse features: nodes of
// class c link with probability p_in inside their class and p_out across,
// and draw most non-zero features from a block of indices owned by c.
struct SyntheticSpec {
  std::size_t num_nodes = 60;
  std::size_t num_classes = 3;
  std::size_t num_features = 30;
  double p_in = 0.15;
  double p_out = 0.02;
  std::size_t mean_nonzeros = 5;
  double feature_signal = 0.7;  // chance a non-zero lands in the class block
  FeatureKind kind = FeatureKind::binary;
};

Graph make_synthetic_graph(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace gani
