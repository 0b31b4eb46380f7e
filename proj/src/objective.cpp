#include "graphid/objective.hpp"

#include <algorithm>
#include <cmath>

#include "graphid/common.hpp"
#include "graphid/tape.hpp"

namespace graphid {

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error("cosine_similarity: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::max(std::sqrt(na), 1e-12);
  nb = std::max(std::sqrt(nb), 1e-12);
  return dot / (na * nb);
}

double ntxent_loss(const Tensor& z1, const Tensor& z2, double tau, bool standard) {
  if (z1.rows != z2.rows || z1.cols != z2.cols)
    throw Error("ntxent_loss: view shape mismatch");
  if (z1.rows < 2) throw Error("ntxent_loss: need at least 2 pairs");
  Tape t;
  int a = t.leaf(z1, false);
  int b = t.leaf(z2, false);
  int na = t.normalize_rows(a);
  int nb = t.normalize_rows(b);
  if (standard) {
    int all = t.concat_rows(na, nb);
    int s = t.matmul_nt(all, all);
    return t.val(t.contrastive_incl(s, tau)).data[0];
  }
  int s = t.matmul_nt(na, nb);
  return t.val(t.contrastive_excl(s, tau)).data[0];
}

double cross_entropy(const Tensor& logits, const std::vector<uint8_t>& labels) {
  Tape t;
  int x = t.leaf(logits, false);
  return t.val(t.cross_entropy(x, labels)).data[0];
}

LossReport joint_loss(double l_d, double l_aug1, double l_aug2, double l_self, double lambda) {
  LossReport r;
  r.l_d = l_d;
  r.l_aug1 = l_aug1;
  r.l_aug2 = l_aug2;
  r.l_self = l_self;
  r.l_pred = (l_d + l_aug1 + l_aug2) / 3.0;
  r.l_total = r.l_pred + lambda * l_self;
  return r;
}

}  // namespace graphid
