#include "graphid/tape.hpp"

#include <algorithm>
#include <cmath>

namespace graphid {

namespace {

// dst rows [offset, offset+v) += block (v×v, symmetric) · src rows [offset, offset+v)
void block_mul_acc(const Tensor& block, const Tensor& src, Tensor& dst, uint32_t offset) {
  const uint32_t v = block.rows;
  const uint32_t n = src.cols;
  for (uint32_t i = 0; i < v; ++i) {
    double* __restrict__ out = dst.row(offset + i);
    const double* brow = block.row(i);
    for (uint32_t k = 0; k < v; ++k) {
      const double x = brow[k];
      if (x == 0.0) continue;
      const double* __restrict__ in = src.row(offset + k);
      for (uint32_t j = 0; j < n; ++j) out[j] += x * in[j];
    }
  }
}

}  // namespace

int Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(value), Tensor(), needs_grad, std::move(back)});
  return static_cast<int>(nodes_.size()) - 1;
}

void Tape::check(int id) const {
  if (id < 0 || static_cast<size_t>(id) >= nodes_.size()) throw Error("tape: bad node id");
}

int Tape::leaf(Tensor value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

int Tape::matmul(int a, int b) {
  check(a);
  check(b);
  const Tensor& av = nodes_[a].val;
  const Tensor& bv = nodes_[b].val;
  if (av.cols != bv.rows) throw Error("matmul: shape mismatch");
  Tensor out = graphid::matmul(av, bv);
  const bool ng = needs(a) || needs(b);
  int id = push(std::move(out), ng, [a, b](Tape& t) -> void {
    const int self = t.backward_cursor_;
    const Tensor& g = t.nodes_[self].grad;
    if (t.needs(a)) gemm_nt_acc(g, t.nodes_[b].val, t.grad_ref(a));
    if (t.needs(b)) gemm_tn_acc(t.nodes_[a].val, g, t.grad_ref(b));
  });
  return id;
}

int Tape::matmul_nt(int a, int b) {
  check(a);
  check(b);
  const Tensor& av = nodes_[a].val;
  const Tensor& bv = nodes_[b].val;
  if (av.cols != bv.cols) throw Error("matmul_nt: shape mismatch");
  Tensor out(av.rows, bv.rows);
  gemm_nt_acc(av, bv, out);
  const bool ng = needs(a) || needs(b);
  return push(std::move(out), ng, [a, b](Tape& t) {
    const int self = t.backward_cursor_;
    const Tensor& g = t.nodes_[self].grad;
    if (t.needs(a)) gemm_nn_acc(g, t.nodes_[b].val, t.grad_ref(a));
    if (t.needs(b)) gemm_tn_acc(g, t.nodes_[a].val, t.grad_ref(b));
  });
}

int Tape::add_bias(int x, int b) {
  check(x);
  check(b);
  const Tensor& xv = nodes_[x].val;
  const Tensor& bv = nodes_[b].val;
  if (bv.rows != 1 || bv.cols != xv.cols) throw Error("add_bias: shape mismatch");
  Tensor out = Tensor::uninit(xv.rows, xv.cols);
  for (uint32_t i = 0; i < out.rows; ++i) {
    const double* s = xv.row(i);
    double* r = out.row(i);
    for (uint32_t j = 0; j < out.cols; ++j) r[j] = s[j] + bv.data[j];
  }
  return push(std::move(out), needs(x) || needs(b), [x, b](Tape& t) {
    const Tensor& g = t.nodes_[t.backward_cursor_].grad;
    if (t.needs(x)) {
      Tensor& gx = t.grad_ref(x);
      for (size_t i = 0; i < g.data.size(); ++i) gx.data[i] += g.data[i];
    }
    if (t.needs(b)) {
      Tensor& gb = t.grad_ref(b);
      for (uint32_t i = 0; i < g.rows; ++i) {
        const double* r = g.row(i);
        for (uint32_t j = 0; j < g.cols; ++j) gb.data[j] += r[j];
      }
    }
  });
}

int Tape::relu(int x) {
  check(x);
  const Tensor& xv = nodes_[x].val;
  Tensor out = Tensor::uninit(xv.rows, xv.cols);
  for (size_t i = 0; i < xv.data.size(); ++i) out.data[i] = xv.data[i] > 0.0 ? xv.data[i] : 0.0;
  return push(std::move(out), needs(x), [x](Tape& t) {
    if (!t.needs(x)) return;
    const int self = t.backward_cursor_;
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& y = t.nodes_[self].val;
    Tensor& gx = t.grad_ref(x);
    for (size_t i = 0; i < g.data.size(); ++i)
      if (y.data[i] > 0.0) gx.data[i] += g.data[i];
  });
}

int Tape::dropout(int x, double p, Rng& rng, bool training) {
  check(x);
  if (!training || p == 0.0) return x;
  if (p < 0.0 || p >= 1.0) throw Error("dropout: p must lie in [0, 1)");
  const double keep_scale = 1.0 / (1.0 - p);
  const Tensor& xv = nodes_[x].val;
  Tensor mask = Tensor::uninit(xv.rows, xv.cols);
  Tensor out = Tensor::uninit(xv.rows, xv.cols);
  for (size_t i = 0; i < xv.data.size(); ++i) {
    const double m = rng.bernoulli(p) ? 0.0 : keep_scale;
    mask.data[i] = m;
    out.data[i] = xv.data[i] * m;
  }
  return push(std::move(out), needs(x), [x, mask = std::move(mask)](Tape& t) {
    if (!t.needs(x)) return;
    const Tensor& g = t.nodes_[t.backward_cursor_].grad;
    Tensor& gx = t.grad_ref(x);
    for (size_t i = 0; i < g.data.size(); ++i) gx.data[i] += g.data[i] * mask.data[i];
  });
}

int Tape::block_apply(int x, const std::vector<Tensor>* blocks,
                      const std::vector<uint32_t>* offsets) {
  check(x);
  const Tensor& xv = nodes_[x].val;
  if (offsets->size() != blocks->size() + 1 || offsets->back() != xv.rows)
    throw Error("block_apply: offsets do not cover the input rows");
  Tensor out(xv.rows, xv.cols);
  for (size_t b = 0; b < blocks->size(); ++b)
    block_mul_acc((*blocks)[b], xv, out, (*offsets)[b]);
  return push(std::move(out), needs(x), [x, blocks, offsets](Tape& t) {
    if (!t.needs(x)) return;
    const Tensor& g = t.nodes_[t.backward_cursor_].grad;
    Tensor& gx = t.grad_ref(x);
    // Each block is symmetric, so the adjoint apply reuses the same matrix.
    for (size_t b = 0; b < blocks->size(); ++b)
      block_mul_acc((*blocks)[b], g, gx, (*offsets)[b]);
  });
}

int Tape::block_maxpool(int x, const std::vector<uint32_t>* offsets) {
  check(x);
  const Tensor& xv = nodes_[x].val;
  const uint32_t nblocks = static_cast<uint32_t>(offsets->size()) - 1;
  if (offsets->back() != xv.rows) throw Error("block_maxpool: offsets do not cover input");
  const uint32_t d = xv.cols;
  Tensor out(nblocks, d);
  std::vector<uint32_t> argmax(static_cast<size_t>(nblocks) * d);
  for (uint32_t b = 0; b < nblocks; ++b) {
    const uint32_t lo = (*offsets)[b], hi = (*offsets)[b + 1];
    if (lo >= hi) throw Error("block_maxpool: empty block");
    double* o = out.row(b);
    uint32_t* arg = argmax.data() + static_cast<size_t>(b) * d;
    const double* first = xv.row(lo);
    for (uint32_t j = 0; j < d; ++j) {
      o[j] = first[j];
      arg[j] = lo;
    }
    for (uint32_t r = lo + 1; r < hi; ++r) {
      const double* in = xv.row(r);
      for (uint32_t j = 0; j < d; ++j)
        if (in[j] > o[j]) {  // strict: the lowest row index wins ties
          o[j] = in[j];
          arg[j] = r;
        }
    }
  }
  return push(std::move(out), needs(x), [x, argmax = std::move(argmax), d](Tape& t) {
    if (!t.needs(x)) return;
    const Tensor& g = t.nodes_[t.backward_cursor_].grad;
    Tensor& gx = t.grad_ref(x);
    for (uint32_t b = 0; b < g.rows; ++b) {
      const double* gr = g.row(b);
      const uint32_t* arg = argmax.data() + static_cast<size_t>(b) * d;
      for (uint32_t j = 0; j < d; ++j) gx.at(arg[j], j) += gr[j];
    }
  });
}

int Tape::gather_rows(int w, std::vector<uint32_t> rows) {
  check(w);
  const Tensor& wv = nodes_[w].val;
  Tensor out = Tensor::uninit(static_cast<uint32_t>(rows.size()), wv.cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= wv.rows) throw Error("gather_rows: row index out of range");
    const double* src = wv.row(rows[r]);
    std::copy(src, src + wv.cols, out.row(static_cast<uint32_t>(r)));
  }
  return push(std::move(out), needs(w), [w, rows = std::move(rows)](Tape& t) {
    if (!t.needs(w)) return;
    const Tensor& g = t.nodes_[t.backward_cursor_].grad;
    Tensor& gw = t.grad_ref(w);
    for (size_t r = 0; r < rows.size(); ++r) {
      const double* gr = g.row(static_cast<uint32_t>(r));
      double* dst = gw.row(rows[r]);
      for (uint32_t j = 0; j < g.cols; ++j) dst[j] += gr[j];
    }
  });
}

int Tape::normalize_rows(int x, double eps) {
  check(x);
  const Tensor& xv = nodes_[x].val;
  Tensor out = xv;
  std::vector<double> norms(xv.rows);
  for (uint32_t i = 0; i < xv.rows; ++i) {
    const double* r = xv.row(i);
    double s = 0.0;
    for (uint32_t j = 0; j < xv.cols; ++j) s += r[j] * r[j];
    norms[i] = std::sqrt(s);
    const double denom = std::max(norms[i], eps);
    double* o = out.row(i);
    for (uint32_t j = 0; j < xv.cols; ++j) o[j] /= denom;
  }
  return push(std::move(out), needs(x), [x, eps, norms = std::move(norms)](Tape& t) {
    if (!t.needs(x)) return;
    const int self = t.backward_cursor_;
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& y = t.nodes_[self].val;
    Tensor& gx = t.grad_ref(x);
    for (uint32_t i = 0; i < g.rows; ++i) {
      const double* gr = g.row(i);
      const double* yr = y.row(i);
      double* o = gx.row(i);
      if (norms[i] > eps) {
        double dot = 0.0;
        for (uint32_t j = 0; j < g.cols; ++j) dot += yr[j] * gr[j];
        for (uint32_t j = 0; j < g.cols; ++j) o[j] += (gr[j] - yr[j] * dot) / norms[i];
      } else {
        for (uint32_t j = 0; j < g.cols; ++j) o[j] += gr[j] / eps;
      }
    }
  });
}

int Tape::concat_rows(int a, int b) {
  check(a);
  check(b);
  const Tensor& av = nodes_[a].val;
  const Tensor& bv = nodes_[b].val;
  if (av.cols != bv.cols) throw Error("concat_rows: column mismatch");
  Tensor out = Tensor::uninit(av.rows + bv.rows, av.cols);
  std::copy(av.data.begin(), av.data.end(), out.data.begin());
  std::copy(bv.data.begin(), bv.data.end(), out.data.begin() + av.data.size());
  return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t) {
    const Tensor& g = t.nodes_[t.backward_cursor_].grad;
    const size_t asz = t.nodes_[a].val.data.size();
    if (t.needs(a)) {
      Tensor& ga = t.grad_ref(a);
      for (size_t i = 0; i < asz; ++i) ga.data[i] += g.data[i];
    }
    if (t.needs(b)) {
      Tensor& gb = t.grad_ref(b);
      for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += g.data[asz + i];
    }
  });
}

int Tape::contrastive_excl(int s, double tau) {
  check(s);
  const Tensor& sv = nodes_[s].val;
  const uint32_t n = sv.rows;
  if (sv.cols != n) throw Error("contrastive loss: similarity matrix must be square");
  if (n < 2) throw Error("contrastive loss: batch must contain at least 2 subgraphs");
  if (tau <= 0.0) throw Error("contrastive loss: tau must be positive");
  Tensor p(n, n);  // off-diagonal softmax per anchor row, zero diagonal
  double total = 0.0;
  for (uint32_t i = 0; i < n; ++i) {
    const double* r = sv.row(i);
    double m = -HUGE_VAL;
    for (uint32_t j = 0; j < n; ++j)
      if (j != i) m = std::max(m, r[j] / tau);
    double z = 0.0;
    double* pr = p.row(i);
    for (uint32_t j = 0; j < n; ++j)
      if (j != i) {
        pr[j] = std::exp(r[j] / tau - m);
        z += pr[j];
      }
    for (uint32_t j = 0; j < n; ++j)
      if (j != i) pr[j] /= z;
    total += -r[i] / tau + m + std::log(z);
  }
  Tensor out(1, 1);
  out.data[0] = total / n;
  return push(std::move(out), needs(s), [s, tau, p = std::move(p), n](Tape& t) {
    if (!t.needs(s)) return;
    const double g = t.nodes_[t.backward_cursor_].grad.data[0];
    const double c = g / (n * tau);
    Tensor& gs = t.grad_ref(s);
    for (uint32_t i = 0; i < n; ++i) {
      const double* pr = p.row(i);
      double* gr = gs.row(i);
      for (uint32_t j = 0; j < n; ++j)
        if (j != i) gr[j] += c * pr[j];
      gr[i] -= c;
    }
  });
}

int Tape::contrastive_incl(int s, double tau) {
  check(s);
  const Tensor& sv = nodes_[s].val;
  const uint32_t m = sv.rows;  // 2n stacked views
  if (sv.cols != m) throw Error("contrastive loss: similarity matrix must be square");
  if (m < 4 || m % 2 != 0)
    throw Error("contrastive loss: stacked batch must contain at least 2 pairs");
  if (tau <= 0.0) throw Error("contrastive loss: tau must be positive");
  const uint32_t n = m / 2;
  Tensor p(m, m);
  double total = 0.0;
  for (uint32_t a = 0; a < m; ++a) {
    const uint32_t pos = (a + n) % m;
    const double* r = sv.row(a);
    double mx = -HUGE_VAL;
    for (uint32_t b = 0; b < m; ++b)
      if (b != a) mx = std::max(mx, r[b] / tau);
    double z = 0.0;
    double* pr = p.row(a);
    for (uint32_t b = 0; b < m; ++b)
      if (b != a) {
        pr[b] = std::exp(r[b] / tau - mx);
        z += pr[b];
      }
    for (uint32_t b = 0; b < m; ++b)
      if (b != a) pr[b] /= z;
    total += -r[pos] / tau + mx + std::log(z);
  }
  Tensor out(1, 1);
  out.data[0] = total / m;
  return push(std::move(out), needs(s), [s, tau, p = std::move(p), m, n](Tape& t) {
    if (!t.needs(s)) return;
    const double g = t.nodes_[t.backward_cursor_].grad.data[0];
    const double c = g / (m * tau);
    Tensor& gs = t.grad_ref(s);
    for (uint32_t a = 0; a < m; ++a) {
      const double* pr = p.row(a);
      double* gr = gs.row(a);
      for (uint32_t b = 0; b < m; ++b)
        if (b != a) gr[b] += c * pr[b];
      gr[(a + n) % m] -= c;
    }
  });
}

int Tape::cross_entropy(int logits, std::vector<uint8_t> labels) {
  check(logits);
  const Tensor& lv = nodes_[logits].val;
  if (labels.size() != lv.rows) throw Error("cross_entropy: label count mismatch");
  for (const uint8_t y : labels)
    if (y >= lv.cols) throw Error("cross_entropy: label out of range");
  const uint32_t n = lv.rows, c = lv.cols;
  Tensor p(n, c);
  double total = 0.0;
  for (uint32_t i = 0; i < n; ++i) {
    const double* r = lv.row(i);
    double m = r[0];
    for (uint32_t j = 1; j < c; ++j) m = std::max(m, r[j]);
    double z = 0.0;
    double* pr = p.row(i);
    for (uint32_t j = 0; j < c; ++j) {
      pr[j] = std::exp(r[j] - m);
      z += pr[j];
    }
    for (uint32_t j = 0; j < c; ++j) pr[j] /= z;
    total += -(r[labels[i]] - m - std::log(z));
  }
  Tensor out(1, 1);
  out.data[0] = total / n;
  return push(std::move(out), needs(logits),
              [logits, p = std::move(p), labels = std::move(labels)](Tape& t) {
                if (!t.needs(logits)) return;
                const double g = t.nodes_[t.backward_cursor_].grad.data[0];
                Tensor& gl = t.grad_ref(logits);
                const uint32_t n = gl.rows, c = gl.cols;
                for (uint32_t i = 0; i < n; ++i) {
                  const double* pr = p.row(i);
                  double* gr = gl.row(i);
                  for (uint32_t j = 0; j < c; ++j)
                    gr[j] += g * (pr[j] - (j == labels[i] ? 1.0 : 0.0)) / n;
                }
              });
}

int Tape::lincomb(std::vector<std::pair<double, int>> terms) {
  double total = 0.0;
  bool ng = false;
  for (const auto& [coeff, id] : terms) {
    check(id);
    if (nodes_[id].val.numel() != 1) throw Error("lincomb: terms must be scalars");
    total += coeff * nodes_[id].val.data[0];
    ng = ng || needs(id);
  }
  Tensor out(1, 1);
  out.data[0] = total;
  return push(std::move(out), ng, [terms = std::move(terms)](Tape& t) {
    const double g = t.nodes_[t.backward_cursor_].grad.data[0];
    for (const auto& [coeff, id] : terms)
      if (t.needs(id)) t.grad_ref(id).data[0] += coeff * g;
  });
}

int Tape::sum(int x) {
  check(x);
  double total = 0.0;
  for (const double v : nodes_[x].val.data) total += v;
  Tensor out(1, 1);
  out.data[0] = total;
  return push(std::move(out), needs(x), [x](Tape& t) {
    if (!t.needs(x)) return;
    const double g = t.nodes_[t.backward_cursor_].grad.data[0];
    Tensor& gx = t.grad_ref(x);
    for (double& v : gx.data) v += g;
  });
}

const Tensor& Tape::grad(int id) {
  check(id);
  if (!ran_backward_) throw Error("tape: gradient requested before backward()");
  if (!nodes_[id].needs_grad) throw Error("tape: node does not track gradients");
  return grad_ref(id);
}

void Tape::backward(int loss) {
  check(loss);
  if (nodes_[loss].val.numel() != 1) throw Error("backward: loss must be a scalar");
  if (ran_backward_) throw Error("backward: tape already replayed");
  ran_backward_ = true;
  if (!nodes_[loss].needs_grad) return;  // nothing upstream tracks gradients
  grad_ref(loss).data[0] = 1.0;
  for (int id = loss; id >= 0; --id) {
    Node& n = nodes_[id];
    // A still-empty grad means nothing downstream touched this node, so its
    // contribution is zero and the closure can be skipped.
    if (!n.needs_grad || !n.back || n.grad.data.empty()) continue;
    backward_cursor_ = id;
    n.back(*this);
  }
}

}  // namespace graphid
