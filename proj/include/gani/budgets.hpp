#pragma once

#include <cstdint>
#include <vector>

#include "gani/graph.hpp"

namespace gani {

struct AttackBudget {
  std::size_t feature_budget = 1;
  std::vector<std::size_t> link_budgets;  // one per injected node
};

// Mean number of non-zero features per original node, rounded half-to-even,
// at least 1.
std::size_t feature_budget(const Graph& g);

// floor(2 * average degree) of the original nodes.
std::size_t max_link_budget(const Graph& g);

// Clamps a degree into [1, max_link_budget].
inline std::size_t clamp_budget(std::size_t degree, std::size_t cap) {
  return degree < 1 ? 1 : (degree > cap ? cap : degree);
}

// Draws n_in degrees uniformly (with replacement) from the original nodes and
// clamps each into [1, floor(2 * average degree)].
std::vector<std::size_t> sample_link_budgets(const Graph& g, std::size_t n_in,
                                             std::uint64_t seed);

}  // namespace gani
