#pragma once

#include <span>
#include <vector>

#include "gani/graph.hpp"

namespace gani {

struct GeneratedFeatures {
  std::vector<double> row;     // length d
  std::size_t shortfall = 0;   // budget minus non-zeros actually placed
};

// Class-conditional feature row for an injected node labelled
// `injected_label`. Picks the `budget` feature indices that are non-zero most
// often among original nodes of that class (ties to the lower index) and sets
// each to the mean of that class's non-zero values at the index. `labels` is
// indexed by node and only its original-node prefix is read.
GeneratedFeatures generate_features(const Graph& g, std::span<const ClassId> labels,
                                    ClassId injected_label, std::size_t budget);

}  // namespace gani
