#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "graphid/sampling.hpp"
#include "graphid/tape.hpp"
#include "graphid/tensor.hpp"

namespace graphid {

/// All trainable tensors: two graph-convolution layers, the two-layer
/// projection head, and the linear classifier head.
struct ModelParams {
  Tensor w1, b1;    // F×hidden, 1×hidden
  Tensor w2, b2;    // hidden×hidden, 1×hidden
  Tensor wp1, bp1;  // hidden×hidden, 1×hidden
  Tensor wp2, bp2;  // hidden×hidden, 1×hidden
  Tensor wc, bc;    // hidden×classes, 1×classes

  /// Glorot-uniform weights, zero biases, seeded.
  static ModelParams init(uint32_t f_in, uint32_t hidden, uint32_t classes, uint64_t seed);

  uint32_t f_in() const { return w1.rows; }
  uint32_t hidden() const { return w1.cols; }
  uint32_t classes() const { return wc.cols; }

  /// Fixed-order named views, shared by the optimizer and the checkpoint format.
  std::vector<std::pair<const char*, Tensor*>> named();
  std::vector<std::pair<const char*, const Tensor*>> named() const;

  bool operator==(const ModelParams&) const = default;
};

/// Symmetric-normalized propagation matrix of a subgraph:
/// Â = D^{-1/2}(A_sym + I)D^{-1/2} over the binarized symmetrized adjacency
/// (or the t-weighted one when weighted is set), D the degree of A_sym + I.
Tensor normalize_adjacency(const AccountSubgraph& g, bool weighted = false);

/// One mini-batch of subgraphs stacked into a tall node-feature matrix with
/// per-subgraph adjacency blocks. Feature columns that are zero across the
/// batch are dropped (exact: zero columns contribute nothing); active_cols
/// maps compact column -> global column for gathering W1 rows.
struct BatchPlan {
  std::vector<uint32_t> offsets;  // per-subgraph row ranges, size m+1
  std::vector<Tensor> adj;        // normalized adjacency per subgraph
  Tensor x;                       // stacked features, rows × |active_cols|
  std::vector<uint32_t> active_cols;
  std::vector<uint8_t> labels;
};

/// adj_override[i], when non-null, supplies a precomputed normalized
/// adjacency (reused for originals across epochs and for feature-masked views,
/// whose topology is unchanged).
BatchPlan build_batch(const std::vector<const AccountSubgraph*>& graphs, uint32_t feat_width,
                      bool weighted_adjacency,
                      const std::vector<const Tensor*>* adj_override = nullptr);

/// Tape node ids of the parameter leaves (gradients tracked).
struct ParamIds {
  int w1, b1, w2, b2, wp1, bp1, wp2, bp2, wc, bc;
};
ParamIds add_params(Tape& tape, const ModelParams& params);

/// Gradients read back in named() order after backward().
std::vector<Tensor> param_grads(Tape& tape, const ParamIds& ids);

struct ForwardIds {
  int h = -1;       // pooled encoder output, m×hidden
  int logits = -1;  // classifier output, m×classes
  int z = -1;       // projection output, m×hidden (-1 when not requested)
};

/// Shared-encoder forward over one batch: two GCN layers with dropout between
/// them, column-wise max pooling per subgraph, classifier on the pooled
/// representation (or on z when classify_on_projection), optional projection
/// head. The batch must outlive the tape.
ForwardIds model_forward(Tape& tape, const ParamIds& p, const BatchPlan& batch, double dropout_p,
                         bool training, Rng& rng, bool want_projection,
                         bool classify_on_projection = false);

/// Single-subgraph forward with explicit adjacency (no dropout scaling when
/// training is false). Returns (H: |V|×hidden node embeddings, h: 1×hidden).
std::pair<Tensor, Tensor> encoder_forward(const Tensor& adj, const Tensor& x_local,
                                          const ModelParams& params, double dropout_p,
                                          bool training, Rng& rng);
/// z = relu(h·Wp1 + bp1)·Wp2 + bp2 for row-stacked h.
Tensor project(const Tensor& h, const ModelParams& params);
/// logits = h·Wc + bc for row-stacked h.
Tensor classify(const Tensor& h, const ModelParams& params);

struct AdamState {
  std::vector<Tensor> m, v;  // named() order
  uint64_t step = 0;
};

/// Standard bias-corrected Adam update; throws on non-finite gradients,
/// naming the offending tensor.
void adam_step(ModelParams& params, const std::vector<Tensor>& grads, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

/// Versioned shape-tagged checkpoint; round-trips bit-exactly.
void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace graphid
