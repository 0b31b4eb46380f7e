#pragma once

#include <cstdint>
#include <vector>

#include "graphid/tensor.hpp"

namespace graphid {

/// Joint-loss breakdown for one batch. l_total = l_pred + lambda·l_self and
/// l_pred = (l_d + l_aug1 + l_aug2)/3 hold to 1e-12. l_self can be negative:
/// the contrastive denominator excludes the positive pair.
struct LossReport {
  double l_self = 0.0;
  double l_pred = 0.0;
  double l_total = 0.0;
  double l_d = 0.0;
  double l_aug1 = 0.0;
  double l_aug2 = 0.0;
  bool contrast_skipped = false;  // batch had fewer than 2 subgraphs
};

/// Cosine similarity of two equal-length vectors; norms are clamped below at
/// 1e-12, so exact-zero inputs yield 0 rather than NaN.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// Mean contrastive loss over row-aligned positive pairs (Z1[i], Z2[i]).
/// Default form: anchors are view-1 rows only and the positive is excluded
/// from the denominator (may be negative). The standard form stacks both
/// views, anchors every row, and keeps the positive in the denominator.
double ntxent_loss(const Tensor& z1, const Tensor& z2, double tau, bool standard = false);

/// Mean cross entropy of row-wise logits against integer labels.
double cross_entropy(const Tensor& logits, const std::vector<uint8_t>& labels);

/// Assembles the joint report: L = (l_d + l_aug1 + l_aug2)/3 + lambda·l_self.
LossReport joint_loss(double l_d, double l_aug1, double l_aug2, double l_self, double lambda);

}  // namespace graphid
