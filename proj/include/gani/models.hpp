#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "gani/graph.hpp"
#include "gani/matrix.hpp"

namespace gani {

struct TrainConfig {
  std::size_t epochs = 200;
  double step_size = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.0;  // GCN only
  std::size_t hidden = 16;  // GCN only
  std::uint64_t seed = 0;

  static TrainConfig sgc_defaults(std::uint64_t seed = 0) {
    return {200, 0.2, 5e-5, 0.0, 16, seed};
  }
  static TrainConfig gcn_defaults(std::uint64_t seed = 0) {
    return {200, 0.01, 5e-4, 0.5, 16, seed};
  }

  void validate() const;
};

// softmax(Â^hops X W). No bias.
struct SgcModel {
  Matrix weights;  // d x C
  std::size_t hops = 2;
  std::uint64_t seed = 0;
  std::optional<Matrix> cached_propagated;  // Â^hops X of the training graph
};

// softmax(Â relu(Â X W1) W2). No bias.
struct GcnModel {
  Matrix w1;  // d x hidden
  Matrix w2;  // hidden x C
  std::size_t hidden = 16;
  std::uint64_t seed = 0;
};

struct Prediction {
  Matrix probabilities;         // n x C, rows sum to 1
  std::vector<ClassId> labels;  // row argmax, ties to the lowest class id
};

// Accepted loss per epoch (index 0 is the loss at initialization).
struct TrainingTrace {
  std::vector<double> losses;
  std::size_t best_epoch = 0;
};

// Â^hops X by repeated sparse-dense products.
Matrix sgc_propagate(const CsrMatrix& a_hat, const Matrix& x, std::size_t hops);

// Logits of an SGC model, computed as Â^hops (X W). Prediction and every
// surrogate score in the attack use this association, so incremental and full
// recomputation agree bit for bit.
Matrix sgc_logits(const SgcModel& model, const CsrMatrix& a_hat, const Matrix& x);

// Row-wise softmax of logits with argmax ties broken to the lowest column.
Prediction softmax_predict(const Matrix& logits);

SgcModel train_sgc(const Graph& g, const DataSplit& split, const TrainConfig& cfg,
                   TrainingTrace* trace = nullptr);
GcnModel train_gcn(const Graph& g, const DataSplit& split, const TrainConfig& cfg,
                   TrainingTrace* trace = nullptr);

Prediction predict(const SgcModel& model, const CsrMatrix& a_hat, const Matrix& x);
Prediction predict(const GcnModel& model, const CsrMatrix& a_hat, const Matrix& x);

// Drops every edge whose endpoint feature similarity is <= threshold: Jaccard
// over non-zero supports for binary features, cosine for continuous ones.
Graph jaccard_preprocess(const Graph& g, double threshold = 0.0);

double evaluate_accuracy(std::span<const ClassId> predicted,
                         std::span<const ClassId> truth,
                         std::span<const NodeId> indices);
double evaluate_accuracy(const SgcModel& model, const Graph& g,
                         std::span<const NodeId> indices);
double evaluate_accuracy(const GcnModel& model, const Graph& g,
                         std::span<const NodeId> indices);

// Loss and gradient entry points, exposed for gradient checking. The loss is
// the mean cross-entropy over `train` plus weight_decay/2 * ||W||^2.
struct SgcLossGradient {
  double loss = 0.0;
  Matrix grad;
};
SgcLossGradient sgc_loss_and_gradient(const Matrix& propagated,
                                      std::span<const NodeId> train,
                                      std::span<const ClassId> labels,
                                      const Matrix& weights, double weight_decay);

// Multiplicative dropout masks: one factor per stored entry of the sparse
// input, and one per hidden activation. Factors are 0 or 1/(1-p).
struct DropoutMasks {
  std::vector<double> input;
  Matrix hidden;
};

struct GcnLossGradient {
  double loss = 0.0;
  Matrix grad_w1;
  Matrix grad_w2;
};
GcnLossGradient gcn_loss_and_gradient(const CsrMatrix& a_hat, const CsrMatrix& x,
                                      std::span<const NodeId> train,
                                      std::span<const ClassId> labels,
                                      const Matrix& w1, const Matrix& w2,
                                      double weight_decay,
                                      const DropoutMasks* masks = nullptr);

// Flat binary model files: 8-byte magic, little-endian uint64 header fields
// (dims, hops or hidden, seed), then row-major float64 weights.
void save_model(const std::filesystem::path& path, const SgcModel& model);
void save_model(const std::filesystem::path& path, const GcnModel& model);
SgcModel load_sgc_model(const std::filesystem::path& path);
GcnModel load_gcn_model(const std::filesystem::path& path);

}  // namespace gani
