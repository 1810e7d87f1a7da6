#include "gani/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gani/error.hpp"

namespace gani {

namespace {

ClassId row_argmax(std::span<const double> z) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < z.size(); ++c) {
    if (z[c] > z[best]) best = c;
  }
  return static_cast<ClassId>(best);
}

double inv_sqrt_degree(std::size_t degree) {
  return 1.0 / std::sqrt(static_cast<double>(degree + 1));
}

}  // namespace

std::vector<ClassId> reference_labels(const Graph& g, const SgcModel& surrogate,
                                      LabelSource source) {
  if (source == LabelSource::ground_truth) {
    return {g.labels().begin(), g.labels().end()};
  }
  return softmax_predict(sgc_logits(surrogate, normalize_adjacency(g), g.features())).labels;
}

InjectionScorer::InjectionScorer(const Graph& g, const SgcModel& surrogate,
                                 std::vector<ClassId> reference, std::vector<NodeId> test)
    : graph_(&g),
      weights_(surrogate.weights),
      reference_(std::move(reference)),
      test_(std::move(test)) {
  const std::size_t n = g.num_nodes();
  if (surrogate.hops != 2) throw InvalidArgument("InjectionScorer: surrogate must use 2 hops");
  if (weights_.rows() != g.num_features()) {
    throw InvalidArgument("InjectionScorer: surrogate width does not match the graph");
  }
  if (reference_.size() != n) {
    throw InvalidArgument("InjectionScorer: need one reference label per node");
  }
  is_test_.assign(n, 0);
  for (const NodeId v : test_) {
    if (v >= n) throw InvalidArgument("InjectionScorer: test index out of range");
    is_test_[v] = 1;
  }

  inv_sqrt_.resize(n);
  same_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    inv_sqrt_[v] = inv_sqrt_degree(g.degree(v));
    std::uint32_t same = 0;
    for (const NodeId u : g.neighbors(v)) same += reference_[u] == reference_[v] ? 1 : 0;
    same_[v] = same;
  }

  const CsrMatrix a_hat = normalize_adjacency(g);
  projected_ = multiply(g.features(), weights_);
  p1_ = multiply(a_hat, projected_);
  p2_ = multiply(a_hat, p1_);
  baseline_pred_.resize(n);
  for (NodeId v = 0; v < n; ++v) baseline_pred_[v] = row_argmax(p2_.row(v));
  for (const NodeId v : test_) {
    if (baseline_pred_[v] != reference_[v]) ++baseline_misclassified_;
  }
}

std::vector<double> InjectionScorer::project(std::span<const double> feature_row) const {
  if (feature_row.size() != weights_.rows()) {
    throw InvalidArgument("project: feature row has the wrong width");
  }
  // Same accumulation order as the dense product in the constructor.
  std::vector<double> out(weights_.cols(), 0.0);
  for (std::size_t j = 0; j < feature_row.size(); ++j) {
    const double x = feature_row[j];
    if (x == 0.0) continue;
    const auto w = weights_.row(j);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += x * w[c];
  }
  return out;
}

void InjectionScorer::check_endpoints(std::span<const NodeId> endpoints) const {
  for (const NodeId v : endpoints) {
    if (v >= graph_->num_nodes()) {
      throw InvalidArgument("endpoint " + std::to_string(v) + " out of range");
    }
    if (graph_->is_injected(v)) {
      throw InvalidArgument("endpoint " + std::to_string(v) + " is an injected node");
    }
  }
}

double InjectionScorer::dnh_of(NodeId v, ClassId injected_label) const {
  const std::size_t deg = graph_->degree(v);
  if (deg == 0) return 0.0;
  // s/d - (s+δ)/(d+1) as one rational, so equal drops give equal doubles.
  const auto same = static_cast<long long>(same_[v]);
  const auto d = static_cast<long long>(deg);
  const long long delta = injected_label == reference_[v] ? 1 : 0;
  return static_cast<double>(same - delta * d) / static_cast<double>(d * (d + 1));
}

const std::vector<NodeId>& InjectionScorer::recompute(std::span<const double> projected,
                                                      std::span<const NodeId> endpoints,
                                                      ScoringWorkspace& ws) const {
  check_endpoints(endpoints);
  if (projected.size() != num_classes()) {
    throw InvalidArgument("score: projected row has the wrong width");
  }
  const Graph& g = *graph_;
  const auto u = static_cast<NodeId>(g.num_nodes());
  const std::size_t classes = num_classes();
  ws.next_epoch();
  const std::uint32_t epoch = ws.epoch_;

  for (const NodeId s : endpoints) {
    if (ws.endpoint_mark_[s] == epoch) throw InvalidArgument("score: duplicate endpoint");
    ws.endpoint_mark_[s] = epoch;
  }
  const double inv_sqrt_u = inv_sqrt_degree(endpoints.size());
  auto inv_sqrt = [&](NodeId x) {
    if (x == u) return inv_sqrt_u;
    if (ws.endpoint_mark_[x] == epoch) return inv_sqrt_degree(g.degree(x) + 1);
    return inv_sqrt_[x];
  };
  auto is_endpoint = [&](NodeId x) { return x != u && ws.endpoint_mark_[x] == epoch; };

  // Visits row v of the perturbed Â in CSR order: smaller neighbors, the
  // self-loop, larger neighbors, then the new node when v is an endpoint.
  auto for_row = [&](NodeId v, auto&& visit) {
    const double sv = inv_sqrt(v);
    if (v == u) {
      std::vector<NodeId> sorted(endpoints.begin(), endpoints.end());
      std::sort(sorted.begin(), sorted.end());
      for (const NodeId s : sorted) visit(s, sv * inv_sqrt(s));
      visit(u, sv * sv);
      return;
    }
    bool self_done = false;
    for (const NodeId x : g.neighbors(v)) {
      if (!self_done && x > v) {
        visit(v, sv * sv);
        self_done = true;
      }
      visit(x, sv * inv_sqrt(x));
    }
    if (!self_done) visit(v, sv * sv);
    if (is_endpoint(v)) visit(u, sv * inv_sqrt_u);
  };

  auto h_row = [&](NodeId x) -> std::span<const double> {
    return x == u ? projected : projected_.row(x);
  };
  auto accumulate_p1 = [&](NodeId v) {
    auto dst = ws.p1_override_.row(v);
    std::fill(dst.begin(), dst.end(), 0.0);
    for_row(v, [&](NodeId x, double a) {
      const auto src = h_row(x);
      for (std::size_t c = 0; c < classes; ++c) dst[c] += a * src[c];
    });
  };

  ws.level1_.clear();
  auto add_level1 = [&](NodeId x) {
    if (ws.level1_mark_[x] != epoch) {
      ws.level1_mark_[x] = epoch;
      ws.level1_.push_back(x);
    }
  };
  for (const NodeId s : endpoints) {
    add_level1(s);
    for (const NodeId x : g.neighbors(s)) add_level1(x);
  }
  for (const NodeId w : ws.level1_) accumulate_p1(w);
  accumulate_p1(u);

  auto p1_row = [&](NodeId x) -> std::span<const double> {
    if (x == u || ws.level1_mark_[x] == epoch) return ws.p1_override_.row(x);
    return p1_.row(x);
  };

  ws.affected_.clear();
  for (const NodeId w : ws.level1_) {
    auto add = [&](NodeId x) {
      if (ws.affected_mark_[x] != epoch) {
        ws.affected_mark_[x] = epoch;
        ws.affected_.push_back(x);
      }
    };
    add(w);
    for (const NodeId x : g.neighbors(w)) add(x);
  }
  auto accumulate_p2 = [&](NodeId v) {
    auto dst = ws.p2_override_.row(v);
    std::fill(dst.begin(), dst.end(), 0.0);
    for_row(v, [&](NodeId x, double a) {
      const auto src = p1_row(x);
      for (std::size_t c = 0; c < classes; ++c) dst[c] += a * src[c];
    });
  };
  for (const NodeId v : ws.affected_) accumulate_p2(v);
  accumulate_p2(u);
  return ws.affected_;
}

Fitness InjectionScorer::score(std::span<const double> projected, ClassId injected_label,
                               std::span<const NodeId> endpoints,
                               ScoringWorkspace& ws) const {
  const auto& affected = recompute(projected, endpoints, ws);
  Fitness f;
  f.misclassified = baseline_misclassified_;
  for (const NodeId v : affected) {
    if (!is_test_[v]) continue;
    const bool was_wrong = baseline_pred_[v] != reference_[v];
    const bool now_wrong = row_argmax(ws.p2_override_.row(v)) != reference_[v];
    if (was_wrong != now_wrong) {
      if (now_wrong) {
        ++f.misclassified;
      } else {
        --f.misclassified;
      }
    }
  }
  std::vector<NodeId> sorted(endpoints.begin(), endpoints.end());
  std::sort(sorted.begin(), sorted.end());
  for (const NodeId v : sorted) f.tdnh += dnh_of(v, injected_label);
  return f;
}

Matrix InjectionScorer::logits_after(std::span<const double> projected,
                                     std::span<const NodeId> endpoints) const {
  ScoringWorkspace ws(*this);
  const auto& affected = recompute(projected, endpoints, ws);
  const auto u = static_cast<NodeId>(graph_->num_nodes());
  Matrix out = p2_;
  out.append_row(ws.p2_override_.row(u));
  for (const NodeId v : affected) {
    const auto src = ws.p2_override_.row(v);
    std::copy(src.begin(), src.end(), out.row(v).begin());
  }
  return out;
}

std::vector<NodeId> InjectionScorer::affected_nodes(std::span<const NodeId> endpoints) const {
  ScoringWorkspace ws(*this);
  const std::vector<double> zeros(num_classes(), 0.0);
  std::vector<NodeId> out = recompute(zeros, endpoints, ws);
  std::sort(out.begin(), out.end());
  return out;
}

ScoringWorkspace::ScoringWorkspace(const InjectionScorer& scorer) {
  const std::size_t n = scorer.graph().num_nodes();
  endpoint_mark_.assign(n, 0);
  level1_mark_.assign(n, 0);
  affected_mark_.assign(n, 0);
  p1_override_ = Matrix(n + 1, scorer.num_classes());
  p2_override_ = Matrix(n + 1, scorer.num_classes());
}

void ScoringWorkspace::next_epoch() {
  if (++epoch_ == 0) {
    std::fill(endpoint_mark_.begin(), endpoint_mark_.end(), 0);
    std::fill(level1_mark_.begin(), level1_mark_.end(), 0);
    std::fill(affected_mark_.begin(), affected_mark_.end(), 0);
    epoch_ = 1;
  }
}

}  // namespace gani
