#include "gani/featuregen.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gani/error.hpp"

namespace gani {

GeneratedFeatures generate_features(const Graph& g, std::span<const ClassId> labels,
                                    ClassId injected_label, std::size_t budget) {
  const std::size_t d = g.num_features();
  const std::size_t n = g.num_original_nodes();
  if (labels.size() < n) throw InvalidArgument("generate_features: too few labels");

  std::vector<std::size_t> appearances(d, 0);
  std::vector<double> sums(d, 0.0);
  std::size_t members = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (labels[v] != injected_label) continue;
    ++members;
    const auto row = g.feature_row(v);
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] != 0.0) {
        ++appearances[j];
        sums[j] += row[j];
      }
    }
  }
  if (members == 0) {
    throw InvalidArgument("generate_features: no node carries label " +
                          std::to_string(injected_label));
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return appearances[a] > appearances[b];
  });

  GeneratedFeatures out;
  out.row.assign(d, 0.0);
  std::size_t placed = 0;
  for (const std::size_t j : order) {
    if (placed == budget || appearances[j] == 0) break;
    out.row[j] = sums[j] / static_cast<double>(appearances[j]);
    ++placed;
  }
  out.shortfall = budget - placed;
  return out;
}

}  // namespace gani
