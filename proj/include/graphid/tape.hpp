#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "graphid/common.hpp"
#include "graphid/tensor.hpp"

namespace graphid {

/// Reverse-mode autodiff over a linear tape of tensor nodes. Values are
/// computed eagerly when an op is recorded; backward() replays the tape in
/// reverse, accumulating exact gradients into every node that needs them.
class Tape {
 public:
  /// Registers an input tensor. Only nodes downstream of a requires_grad leaf
  /// receive gradients.
  int leaf(Tensor value, bool requires_grad = false);

  /// C = A·B
  int matmul(int a, int b);
  /// C = A·Bᵀ
  int matmul_nt(int a, int b);
  /// Adds a 1×n bias row to every row of x.
  int add_bias(int x, int b);
  int relu(int x);
  /// Inverted-scaling dropout: keep with probability 1-p, scale kept entries
  /// by 1/(1-p); identity when not training or p = 0.
  int dropout(int x, double p, Rng& rng, bool training);
  /// y[r] = blocks[b]·x[r] per block of rows; each block matrix must be
  /// symmetric (the normalized adjacency is) and outlive the tape.
  int block_apply(int x, const std::vector<Tensor>* blocks,
                  const std::vector<uint32_t>* offsets);
  /// Column-wise max over each block of rows; gradient routes to the lowest
  /// argmax row per column.
  int block_maxpool(int x, const std::vector<uint32_t>* offsets);
  /// out[r] = w[rows[r]]; used for feature-column compaction of W1.
  int gather_rows(int w, std::vector<uint32_t> rows);
  /// Row-wise L2 normalization with the norm clamped below at eps.
  int normalize_rows(int x, double eps = 1e-12);
  int concat_rows(int a, int b);
  /// Contrastive loss over a row-aligned cosine-similarity matrix s (n×n,
  /// n >= 2): mean over anchors i of -s_ii/tau + logsumexp_{j != i}(s_ij/tau).
  /// The positive pair is excluded from the denominator, so the value can be
  /// negative.
  int contrastive_excl(int s, double tau);
  /// Conventional form over the stacked-view similarity matrix s (2n×2n):
  /// every row anchors, the positive of anchor a is a+n (mod 2n), and the
  /// denominator runs over all b != a including the positive.
  int contrastive_incl(int s, double tau);
  /// Mean cross entropy of row-wise logits against integer labels.
  int cross_entropy(int logits, std::vector<uint8_t> labels);
  /// Scalar linear combination sum_k coeff_k · scalar_k.
  int lincomb(std::vector<std::pair<double, int>> terms);
  int sum(int x);

  const Tensor& val(int id) const { return nodes_[id].val; }
  /// Gradient of the loss w.r.t. node id; zeros if nothing flowed into it.
  const Tensor& grad(int id);

  /// Seeds d(loss)/d(loss) = 1 and replays the tape in reverse. loss must be
  /// a 1×1 node expected to be recorded after a forward pass.
  void backward(int loss);

 private:
  struct Node {
    Tensor val;
    Tensor grad;
    bool needs_grad = false;
    std::function<void(Tape&)> back;  // empty for leaves
  };

  int push(Tensor value, bool needs_grad, std::function<void(Tape&)> back);
  /// Grads materialize lazily on first accumulation, so untouched branches
  /// cost nothing and backward() can skip them outright.
  Tensor& grad_ref(int id) {
    Tensor& g = nodes_[id].grad;
    if (g.data.empty()) g = Tensor(nodes_[id].val.rows, nodes_[id].val.cols);
    return g;
  }
  bool needs(int id) const { return nodes_[id].needs_grad; }
  void check(int id) const;

  std::vector<Node> nodes_;
  int backward_cursor_ = -1;  // node whose closure is currently running
  bool ran_backward_ = false;
};

}  // namespace graphid
