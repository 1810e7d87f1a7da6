#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gani/graph.hpp"
#include "gani/models.hpp"

namespace gani {

// Where the attack takes node labels from: the frozen surrogate's clean-graph
// predictions, or the ground truth.
enum class LabelSource { predicted, ground_truth };

// Attack objective for one candidate injection: how many test nodes the
// frozen surrogate gets "wrong" (prediction differs from the reference label)
// and the total homophily drop over the linked endpoints.
struct Fitness {
  std::size_t misclassified = 0;
  double tdnh = 0.0;

  friend bool operator==(const Fitness&, const Fitness&) = default;
};

// Lexicographic: more misclassified first, then higher TDNH.
inline bool better(const Fitness& a, const Fitness& b) {
  if (a.misclassified != b.misclassified) return a.misclassified > b.misclassified;
  return a.tdnh > b.tdnh;
}

// Per-node labels used as c_v and for homophily: ground truth, or argmax of
// the surrogate on `g`.
std::vector<ClassId> reference_labels(const Graph& g, const SgcModel& surrogate,
                                      LabelSource source);

class ScoringWorkspace;

// Scores hypothetical single-node injections into a fixed graph under a
// frozen SGC surrogate without materialising the perturbed graph.
//
// Linking a new node u to endpoints S changes Â only in rows/columns of S and
// u, so Â^2 H changes only for nodes within two hops of S (plus u itself).
// Those rows are recomputed in exactly the order a full recomputation would
// use; every other row is reused from the cached baseline.
//
// Holds a reference to `g`, which must outlive the scorer. Const methods are
// safe to call concurrently with distinct workspaces.
class InjectionScorer {
 public:
  InjectionScorer(const Graph& g, const SgcModel& surrogate,
                  std::vector<ClassId> reference, std::vector<NodeId> test);

  const Graph& graph() const noexcept { return *graph_; }
  std::span<const ClassId> reference() const noexcept { return reference_; }
  std::span<const NodeId> test() const noexcept { return test_; }
  const Matrix& baseline_logits() const noexcept { return p2_; }
  std::size_t num_classes() const noexcept { return projected_.cols(); }

  // Misclassified count with no injection; tdnh is 0.
  Fitness baseline() const noexcept { return {baseline_misclassified_, 0.0}; }

  // feature_row · W, the only part of a new node's features the surrogate sees.
  std::vector<double> project(std::span<const double> feature_row) const;

  Fitness score(std::span<const double> projected, ClassId injected_label,
                std::span<const NodeId> endpoints, ScoringWorkspace& ws) const;

  // Full logits (num_nodes + 1 rows) after the hypothetical injection.
  Matrix logits_after(std::span<const double> projected,
                      std::span<const NodeId> endpoints) const;

  // Nodes whose logits may change for the given endpoints: everything within
  // two hops of an endpoint, sorted.
  std::vector<NodeId> affected_nodes(std::span<const NodeId> endpoints) const;

 private:
  friend class ScoringWorkspace;

  void check_endpoints(std::span<const NodeId> endpoints) const;
  // Fills ws with recomputed logits for the affected set; returns that set.
  const std::vector<NodeId>& recompute(std::span<const double> projected,
                                       std::span<const NodeId> endpoints,
                                       ScoringWorkspace& ws) const;
  double dnh_of(NodeId v, ClassId injected_label) const;

  const Graph* graph_;
  Matrix weights_;
  std::vector<ClassId> reference_;
  std::vector<NodeId> test_;
  std::vector<char> is_test_;
  std::vector<double> inv_sqrt_;     // 1/sqrt(deg + 1)
  std::vector<std::uint32_t> same_;  // neighbors sharing the reference label
  Matrix projected_;                 // H = X W
  Matrix p1_;                        // Â H
  Matrix p2_;                        // Â Â H
  std::vector<ClassId> baseline_pred_;
  std::size_t baseline_misclassified_ = 0;
};

// Per-thread scratch space for InjectionScorer::score.
class ScoringWorkspace {
 public:
  explicit ScoringWorkspace(const InjectionScorer& scorer);

 private:
  friend class InjectionScorer;

  void next_epoch();

  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> endpoint_mark_;
  std::vector<std::uint32_t> level1_mark_;   // in S ∪ N(S)
  std::vector<std::uint32_t> affected_mark_;
  std::vector<NodeId> level1_;
  std::vector<NodeId> affected_;
  Matrix p1_override_;  // valid for level1_ rows and the new node
  Matrix p2_override_;  // valid for affected_ rows and the new node
};

}  // namespace gani
