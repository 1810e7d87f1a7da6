#include "gani/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gani/error.hpp"
#include "gani/random.hpp"

namespace gani {

namespace {

constexpr double kSecondMomentDecay = 0.999;
constexpr double kEpsilon = 1e-8;
constexpr int kMaxHalvings = 40;

// Per-parameter step scaling by a running RMS of past gradients, no momentum.
class AdaptiveStep {
 public:
  explicit AdaptiveStep(std::size_t size) : second_moment_(size, 0.0) {}

  void observe(std::span<const double> grad) {
    ++steps_;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      second_moment_[i] = kSecondMomentDecay * second_moment_[i] +
                          (1.0 - kSecondMomentDecay) * grad[i] * grad[i];
    }
  }

  void apply(std::span<double> weights, std::span<const double> grad,
             double step_size) const {
    const double correction = 1.0 - std::pow(kSecondMomentDecay, static_cast<double>(steps_));
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double scale = std::sqrt(second_moment_[i] / correction) + kEpsilon;
      weights[i] -= step_size * grad[i] / scale;
    }
  }

 private:
  std::vector<double> second_moment_;
  std::size_t steps_ = 0;
};

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  Matrix w(fan_in, fan_out);
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& x : w.data()) x = (2.0 * uniform01(rng) - 1.0) * limit;
  return w;
}

double squared_norm(const Matrix& m) {
  double s = 0.0;
  for (const double x : m.data()) s += x * x;
  return s;
}

void check_finite(double loss, const char* model, std::size_t epoch) {
  if (!std::isfinite(loss)) {
    throw TrainingError(std::string(model) + " loss became non-finite at epoch " +
                        std::to_string(epoch) + "; lower step_size or check features");
  }
}

void check_train_inputs(const Graph& g, const DataSplit& split, const TrainConfig& cfg) {
  cfg.validate();
  if (split.train.empty()) throw InvalidArgument("training set is empty");
  split.validate(g.num_nodes());
  if (g.num_classes() == 0) throw InvalidArgument("graph has no classes");
}

// Cross-entropy over `rows` of `logits`; writes d loss / d logits (already
// divided by rows.size()) into `grad` when non-null.
double cross_entropy(const Matrix& logits, std::span<const NodeId> rows,
                     std::span<const ClassId> labels, Matrix* grad) {
  const std::size_t classes = logits.cols();
  const double inv = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;
  std::vector<double> p(classes);
  for (const NodeId v : rows) {
    const auto z = logits.row(v);
    const double m = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(z[c] - m);
    const auto y = static_cast<std::size_t>(labels[v]);
    loss -= (z[y] - m - std::log(denom)) * inv;
    if (grad != nullptr) {
      auto dz = grad->row(v);
      for (std::size_t c = 0; c < classes; ++c) {
        dz[c] = (std::exp(z[c] - m) / denom - (c == y ? 1.0 : 0.0)) * inv;
      }
    }
  }
  return loss;
}

Matrix gather_rows(const Matrix& m, std::span<const NodeId> rows) {
  Matrix out(0, m.cols());
  for (const NodeId v : rows) out.append_row(m.row(v));
  return out;
}

// out = a * b^T.
Matrix multiply_by_transpose(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto lhs = a.row(r);
    for (std::size_t k = 0; k < b.rows(); ++k) {
      const auto rhs = b.row(k);
      double s = 0.0;
      for (std::size_t c = 0; c < lhs.size(); ++c) s += lhs[c] * rhs[c];
      out(r, k) = s;
    }
  }
  return out;
}

void add_scaled(Matrix& dst, const Matrix& src, double scale) {
  auto d = dst.data();
  const auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += scale * s[i];
}

struct GcnForward {
  CsrMatrix dropped_x;
  Matrix pre_activation;  // Â X W1
  Matrix hidden;          // dropout(relu(pre_activation))
  Matrix logits;          // Â hidden W2
};

GcnForward gcn_forward(const CsrMatrix& a_hat, const CsrMatrix& x, const Matrix& w1,
                       const Matrix& w2, const DropoutMasks* masks) {
  GcnForward f;
  f.dropped_x = x;
  if (masks != nullptr) {
    for (std::size_t e = 0; e < f.dropped_x.values.size(); ++e) {
      f.dropped_x.values[e] *= masks->input[e];
    }
  }
  f.pre_activation = multiply(a_hat, multiply(f.dropped_x, w1));
  f.hidden = f.pre_activation;
  auto h = f.hidden.data();
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = std::max(h[i], 0.0);
    if (masks != nullptr) h[i] *= masks->hidden.data()[i];
  }
  f.logits = multiply(a_hat, multiply(f.hidden, w2));
  return f;
}

DropoutMasks sample_masks(const CsrMatrix& x, std::size_t rows, std::size_t hidden,
                          double p, Rng& rng) {
  const double keep = 1.0 / (1.0 - p);
  DropoutMasks m;
  m.input.resize(x.nnz());
  for (double& f : m.input) f = bernoulli(rng, p) ? 0.0 : keep;
  m.hidden = Matrix(rows, hidden);
  for (double& f : m.hidden.data()) f = bernoulli(rng, p) ? 0.0 : keep;
  return m;
}

double subset_accuracy(const Matrix& logits, std::span<const ClassId> labels,
                       std::span<const NodeId> rows) {
  std::size_t correct = 0;
  for (const NodeId v : rows) {
    const auto z = logits.row(v);
    const auto best = static_cast<ClassId>(std::max_element(z.begin(), z.end()) - z.begin());
    if (best == labels[v]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (!(step_size > 0.0)) throw InvalidArgument("step_size must be > 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("dropout must be in [0, 1)");
  if (weight_decay < 0.0) throw InvalidArgument("weight_decay must be >= 0");
  if (hidden == 0) throw InvalidArgument("hidden width must be >= 1");
}

Matrix sgc_propagate(const CsrMatrix& a_hat, const Matrix& x, std::size_t hops) {
  Matrix out = x;
  for (std::size_t h = 0; h < hops; ++h) out = multiply(a_hat, out);
  return out;
}

Prediction softmax_predict(const Matrix& logits) {
  Prediction p;
  p.probabilities = Matrix(logits.rows(), logits.cols());
  p.labels.resize(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto z = logits.row(r);
    auto out = p.probabilities.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
      if (z[c] > z[best]) best = c;
    }
    double denom = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      out[c] = std::exp(z[c] - z[best]);
      denom += out[c];
    }
    for (double& x : out) x /= denom;
    p.labels[r] = static_cast<ClassId>(best);
  }
  return p;
}

SgcLossGradient sgc_loss_and_gradient(const Matrix& propagated,
                                      std::span<const NodeId> train,
                                      std::span<const ClassId> labels,
                                      const Matrix& weights, double weight_decay) {
  const Matrix logits = multiply(propagated, weights);
  Matrix dlogits(logits.rows(), logits.cols());
  SgcLossGradient out;
  out.loss = cross_entropy(logits, train, labels, &dlogits) +
             0.5 * weight_decay * squared_norm(weights);
  out.grad = multiply_transposed(propagated, dlogits);
  add_scaled(out.grad, weights, weight_decay);
  return out;
}

GcnLossGradient gcn_loss_and_gradient(const CsrMatrix& a_hat, const CsrMatrix& x,
                                      std::span<const NodeId> train,
                                      std::span<const ClassId> labels,
                                      const Matrix& w1, const Matrix& w2,
                                      double weight_decay, const DropoutMasks* masks) {
  const GcnForward f = gcn_forward(a_hat, x, w1, w2, masks);
  Matrix dlogits(f.logits.rows(), f.logits.cols());
  GcnLossGradient out;
  out.loss = cross_entropy(f.logits, train, labels, &dlogits) +
             0.5 * weight_decay * (squared_norm(w1) + squared_norm(w2));

  // Â is symmetric, so its transpose never needs to be formed.
  const Matrix d_hidden_w2 = multiply(a_hat, dlogits);
  out.grad_w2 = multiply_transposed(f.hidden, d_hidden_w2);
  add_scaled(out.grad_w2, w2, weight_decay);

  Matrix d_pre = multiply_by_transpose(d_hidden_w2, w2);
  auto dp = d_pre.data();
  const auto pre = f.pre_activation.data();
  for (std::size_t i = 0; i < dp.size(); ++i) {
    if (pre[i] <= 0.0) {
      dp[i] = 0.0;
    } else if (masks != nullptr) {
      dp[i] *= masks->hidden.data()[i];
    }
  }
  out.grad_w1 = multiply_transposed(f.dropped_x, multiply(a_hat, d_pre));
  add_scaled(out.grad_w1, w1, weight_decay);
  return out;
}

SgcModel train_sgc(const Graph& g, const DataSplit& split, const TrainConfig& cfg,
                   TrainingTrace* trace) {
  check_train_inputs(g, split, cfg);
  SgcModel model;
  model.seed = cfg.seed;
  Matrix propagated = sgc_propagate(normalize_adjacency(g), g.features(), model.hops);

  // Only training rows enter the loss; relabel them 0..|train|-1.
  const Matrix train_rows = gather_rows(propagated, split.train);
  std::vector<NodeId> rows(split.train.size());
  std::vector<ClassId> labels(split.train.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = static_cast<NodeId>(i);
    labels[i] = g.label(split.train[i]);
  }

  Rng rng = make_rng(derive_seed(cfg.seed, 0x5347));
  model.weights = glorot_uniform(g.num_features(), g.num_classes(), rng);
  auto current = sgc_loss_and_gradient(train_rows, rows, labels, model.weights,
                                       cfg.weight_decay);
  check_finite(current.loss, "SGC", 0);
  TrainingTrace local;
  local.losses.push_back(current.loss);

  AdaptiveStep optimizer(model.weights.size());
  double step = cfg.step_size;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    optimizer.observe(current.grad.data());
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxHalvings && !accepted; ++attempt) {
      Matrix candidate = model.weights;
      optimizer.apply(candidate.data(), current.grad.data(), step);
      auto next = sgc_loss_and_gradient(train_rows, rows, labels, candidate,
                                        cfg.weight_decay);
      check_finite(next.loss, "SGC", epoch);
      if (next.loss <= current.loss) {
        model.weights = std::move(candidate);
        current = std::move(next);
        accepted = true;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) break;  // no descent left at representable step sizes
    local.losses.push_back(current.loss);
    local.best_epoch = epoch;
  }
  model.cached_propagated = std::move(propagated);
  if (trace != nullptr) *trace = std::move(local);
  return model;
}

GcnModel train_gcn(const Graph& g, const DataSplit& split, const TrainConfig& cfg,
                   TrainingTrace* trace) {
  check_train_inputs(g, split, cfg);
  const CsrMatrix a_hat = normalize_adjacency(g);
  const CsrMatrix x = sparsify(g.features());

  Rng init_rng = make_rng(derive_seed(cfg.seed, 0x4743, 0));
  Rng dropout_rng = make_rng(derive_seed(cfg.seed, 0x4743, 1));

  GcnModel model;
  model.hidden = cfg.hidden;
  model.seed = cfg.seed;
  model.w1 = glorot_uniform(g.num_features(), cfg.hidden, init_rng);
  model.w2 = glorot_uniform(cfg.hidden, g.num_classes(), init_rng);

  AdaptiveStep opt1(model.w1.size());
  AdaptiveStep opt2(model.w2.size());
  TrainingTrace local;
  GcnModel best = model;
  double best_val = -1.0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::optional<DropoutMasks> masks;
    if (cfg.dropout > 0.0) {
      masks = sample_masks(x, g.num_nodes(), cfg.hidden, cfg.dropout, dropout_rng);
    }
    const auto lg = gcn_loss_and_gradient(a_hat, x, split.train, g.labels(), model.w1,
                                          model.w2, cfg.weight_decay,
                                          masks ? &*masks : nullptr);
    check_finite(lg.loss, "GCN", epoch);
    local.losses.push_back(lg.loss);
    opt1.observe(lg.grad_w1.data());
    opt2.observe(lg.grad_w2.data());
    opt1.apply(model.w1.data(), lg.grad_w1.data(), cfg.step_size);
    opt2.apply(model.w2.data(), lg.grad_w2.data(), cfg.step_size);

    if (!split.val.empty()) {
      const GcnForward f = gcn_forward(a_hat, x, model.w1, model.w2, nullptr);
      const double val = subset_accuracy(f.logits, g.labels(), split.val);
      if (val > best_val) {
        best_val = val;
        best = model;
        local.best_epoch = epoch;
      }
    }
  }
  if (split.val.empty()) {
    best = model;
    local.best_epoch = cfg.epochs == 0 ? 0 : cfg.epochs - 1;
  }
  if (trace != nullptr) *trace = std::move(local);
  return best;
}

Matrix sgc_logits(const SgcModel& model, const CsrMatrix& a_hat, const Matrix& x) {
  if (x.cols() != model.weights.rows()) {
    throw InvalidArgument("SGC: feature width does not match the weights");
  }
  return sgc_propagate(a_hat, multiply(x, model.weights), model.hops);
}

Prediction predict(const SgcModel& model, const CsrMatrix& a_hat, const Matrix& x) {
  return softmax_predict(sgc_logits(model, a_hat, x));
}

Prediction predict(const GcnModel& model, const CsrMatrix& a_hat, const Matrix& x) {
  if (x.cols() != model.w1.rows()) {
    throw InvalidArgument("predict: feature width does not match GCN weights");
  }
  return softmax_predict(gcn_forward(a_hat, sparsify(x), model.w1, model.w2, nullptr).logits);
}

Graph jaccard_preprocess(const Graph& g, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidArgument("jaccard threshold must be >= 0");
  const bool binary = g.feature_kind() == FeatureKind::binary;
  auto similarity = [&](NodeId u, NodeId v) {
    const auto a = g.feature_row(u);
    const auto b = g.feature_row(v);
    if (binary) {
      std::size_t inter = 0;
      std::size_t uni = 0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        const bool x = a[j] != 0.0;
        const bool y = b[j] != 0.0;
        inter += static_cast<std::size_t>(x && y);
        uni += static_cast<std::size_t>(x || y);
      }
      return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      dot += a[j] * b[j];
      na += a[j] * a[j];
      nb += b[j] * b[j];
    }
    return (na == 0.0 || nb == 0.0) ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
  };

  std::vector<std::pair<NodeId, NodeId>> kept;
  for (const auto& [u, v] : g.edge_list()) {
    if (similarity(u, v) > threshold) kept.emplace_back(u, v);
  }
  return Graph::from_edges(g.num_nodes(), kept, g.features(),
                           std::vector<ClassId>(g.labels().begin(), g.labels().end()),
                           g.num_classes(), g.feature_kind(), g.num_original_nodes());
}

double evaluate_accuracy(std::span<const ClassId> predicted,
                         std::span<const ClassId> truth,
                         std::span<const NodeId> indices) {
  if (indices.empty()) throw InvalidArgument("evaluate_accuracy: no indices");
  std::size_t correct = 0;
  for (const NodeId v : indices) {
    if (predicted[v] == truth[v]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

double evaluate_accuracy(const SgcModel& model, const Graph& g,
                         std::span<const NodeId> indices) {
  const auto p = predict(model, normalize_adjacency(g), g.features());
  return evaluate_accuracy(p.labels, g.labels(), indices);
}

double evaluate_accuracy(const GcnModel& model, const Graph& g,
                         std::span<const NodeId> indices) {
  const auto p = predict(model, normalize_adjacency(g), g.features());
  return evaluate_accuracy(p.labels, g.labels(), indices);
}

}  // namespace gani
