#include "gani/budgets.hpp"

#include <algorithm>
#include <cmath>

#include "gani/error.hpp"
#include "gani/random.hpp"

namespace gani {

std::size_t feature_budget(const Graph& g) {
  const std::size_t n = g.num_original_nodes();
  std::size_t nonzeros = 0;
  for (NodeId v = 0; v < n; ++v) {
    for (const double x : g.feature_row(v)) nonzeros += static_cast<std::size_t>(x != 0.0);
  }
  if (nonzeros == 0) throw InvalidArgument("feature_budget: every feature is zero");
  // nearbyint honours the current rounding mode, which defaults to
  // round-half-to-even.
  const double mean = static_cast<double>(nonzeros) / static_cast<double>(n);
  const auto rounded = static_cast<std::size_t>(std::nearbyint(mean));
  return rounded < 1 ? 1 : rounded;
}

std::size_t max_link_budget(const Graph& g) {
  const std::size_t n = g.num_original_nodes();
  if (n == 0) throw InvalidArgument("max_link_budget: empty graph");
  std::size_t degree_sum = 0;
  for (NodeId v = 0; v < n; ++v) degree_sum += g.degree(v);
  // floor(2 * sum / n) in integers avoids any floating-point edge at exact
  // multiples.
  return 2 * degree_sum / n;
}

std::vector<std::size_t> sample_link_budgets(const Graph& g, std::size_t n_in,
                                             std::uint64_t seed) {
  if (n_in < 1) throw InvalidArgument("sample_link_budgets: n_in must be >= 1");
  if (g.num_edges() == 0) {
    throw InvalidArgument("sample_link_budgets: graph has no edges to sample degrees from");
  }
  // A graph averaging under half an edge per node would give cap 0.
  const std::size_t cap = std::max<std::size_t>(1, max_link_budget(g));
  Rng rng = make_rng(seed);
  std::vector<std::size_t> budgets(n_in);
  for (auto& b : budgets) {
    const auto v = static_cast<NodeId>(uniform_index(rng, g.num_original_nodes()));
    b = clamp_budget(g.degree(v), cap);
  }
  return budgets;
}

}  // namespace gani
