#include "graphid/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "graphid/binio.hpp"
#include "graphid/common.hpp"

namespace graphid {

namespace {

constexpr char kModelMagic[4] = {'B', 'G', 'C', 'M'};
constexpr uint32_t kModelVersion = 1;

Tensor glorot(uint32_t fan_in, uint32_t fan_out, Rng& rng) {
  Tensor t(fan_in, fan_out);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : t.data) v = rng.uniform(-limit, limit);
  return t;
}

}  // namespace

ModelParams ModelParams::init(uint32_t f_in, uint32_t hidden, uint32_t classes, uint64_t seed) {
  if (f_in == 0 || hidden == 0 || classes == 0) throw Error("model init: zero dimension");
  ModelParams p;
  Rng rng(mix_seed(seed, 0x1417ull));
  p.w1 = glorot(f_in, hidden, rng);
  p.b1 = Tensor(1, hidden);
  p.w2 = glorot(hidden, hidden, rng);
  p.b2 = Tensor(1, hidden);
  p.wp1 = glorot(hidden, hidden, rng);
  p.bp1 = Tensor(1, hidden);
  p.wp2 = glorot(hidden, hidden, rng);
  p.bp2 = Tensor(1, hidden);
  p.wc = glorot(hidden, classes, rng);
  p.bc = Tensor(1, classes);
  return p;
}

std::vector<std::pair<const char*, Tensor*>> ModelParams::named() {
  return {{"w1", &w1},   {"b1", &b1},   {"w2", &w2},   {"b2", &b2},   {"wp1", &wp1},
          {"bp1", &bp1}, {"wp2", &wp2}, {"bp2", &bp2}, {"wc", &wc},   {"bc", &bc}};
}

std::vector<std::pair<const char*, const Tensor*>> ModelParams::named() const {
  return {{"w1", &w1},   {"b1", &b1},   {"w2", &w2},   {"b2", &b2},   {"wp1", &wp1},
          {"bp1", &bp1}, {"wp2", &wp2}, {"bp2", &bp2}, {"wc", &wc},   {"bc", &bc}};
}

Tensor normalize_adjacency(const AccountSubgraph& g, bool weighted) {
  const uint32_t n = g.size();
  if (n == 0) throw Error("normalize_adjacency: empty subgraph");
  Tensor m(n, n);
  for (const auto& e : g.edges) {
    const double w = weighted ? static_cast<double>(e.t) : 1.0;
    if (weighted) {
      m.at(e.src, e.dst) += w;
      if (e.src != e.dst) m.at(e.dst, e.src) += w;
    } else {
      m.at(e.src, e.dst) = 1.0;
      m.at(e.dst, e.src) = 1.0;
    }
  }
  for (uint32_t i = 0; i < n; ++i) m.at(i, i) += 1.0;  // self-loops
  std::vector<double> dinv(n);
  for (uint32_t i = 0; i < n; ++i) {
    double deg = 0.0;
    const double* r = m.row(i);
    for (uint32_t j = 0; j < n; ++j) deg += r[j];
    dinv[i] = 1.0 / std::sqrt(deg);  // deg >= 1 from the self-loop
  }
  for (uint32_t i = 0; i < n; ++i) {
    double* r = m.row(i);
    for (uint32_t j = 0; j < n; ++j) r[j] *= dinv[i] * dinv[j];
  }
  return m;
}

BatchPlan build_batch(const std::vector<const AccountSubgraph*>& graphs, uint32_t feat_width,
                      bool weighted_adjacency,
                      const std::vector<const Tensor*>* adj_override) {
  if (graphs.empty()) throw Error("build_batch: empty batch");
  BatchPlan plan;
  plan.offsets.reserve(graphs.size() + 1);
  plan.offsets.push_back(0);
  plan.adj.reserve(graphs.size());
  plan.labels.reserve(graphs.size());

  // Column compaction: keep only feature columns with support in this batch.
  std::vector<uint8_t> used(feat_width, 0);
  uint32_t total_rows = 0;
  for (const AccountSubgraph* g : graphs) {
    total_rows += g->size();
    plan.offsets.push_back(total_rows);
    for (const auto& row : g->feat_rows)
      for (const auto& [col, val] : row) {
        if (col >= feat_width) throw Error("build_batch: feature column out of range");
        used[col] = 1;
      }
  }
  std::vector<uint32_t> compact(feat_width, UINT32_MAX);
  for (uint32_t c = 0; c < feat_width; ++c)
    if (used[c]) {
      compact[c] = static_cast<uint32_t>(plan.active_cols.size());
      plan.active_cols.push_back(c);
    }
  // A batch with no feature support still needs one column so shapes stay valid.
  if (plan.active_cols.empty()) plan.active_cols.push_back(0);

  plan.x = Tensor(total_rows, static_cast<uint32_t>(plan.active_cols.size()));
  uint32_t row0 = 0;
  for (size_t i = 0; i < graphs.size(); ++i) {
    const AccountSubgraph* g = graphs[i];
    for (uint32_t r = 0; r < g->size(); ++r) {
      double* dst = plan.x.row(row0 + r);
      for (const auto& [col, val] : g->feat_rows[r]) dst[compact[col]] = val;
    }
    row0 += g->size();
    if (adj_override && (*adj_override)[i])
      plan.adj.push_back(*(*adj_override)[i]);
    else
      plan.adj.push_back(normalize_adjacency(*g, weighted_adjacency));
    plan.labels.push_back(g->label.value_or(0));
  }
  return plan;
}

ParamIds add_params(Tape& tape, const ModelParams& p) {
  ParamIds ids;
  ids.w1 = tape.leaf(p.w1, true);
  ids.b1 = tape.leaf(p.b1, true);
  ids.w2 = tape.leaf(p.w2, true);
  ids.b2 = tape.leaf(p.b2, true);
  ids.wp1 = tape.leaf(p.wp1, true);
  ids.bp1 = tape.leaf(p.bp1, true);
  ids.wp2 = tape.leaf(p.wp2, true);
  ids.bp2 = tape.leaf(p.bp2, true);
  ids.wc = tape.leaf(p.wc, true);
  ids.bc = tape.leaf(p.bc, true);
  return ids;
}

std::vector<Tensor> param_grads(Tape& tape, const ParamIds& ids) {
  return {tape.grad(ids.w1),  tape.grad(ids.b1),  tape.grad(ids.w2),  tape.grad(ids.b2),
          tape.grad(ids.wp1), tape.grad(ids.bp1), tape.grad(ids.wp2), tape.grad(ids.bp2),
          tape.grad(ids.wc),  tape.grad(ids.bc)};
}

ForwardIds model_forward(Tape& tape, const ParamIds& p, const BatchPlan& batch, double dropout_p,
                         bool training, Rng& rng, bool want_projection,
                         bool classify_on_projection) {
  const int x = tape.leaf(batch.x, false);
  const int w1c = tape.gather_rows(p.w1, batch.active_cols);
  const int xw = tape.matmul(x, w1c);
  const int s1 = tape.block_apply(xw, &batch.adj, &batch.offsets);
  const int h1 = tape.relu(tape.add_bias(s1, p.b1));
  const int h1d = tape.dropout(h1, dropout_p, rng, training);
  const int hw = tape.matmul(h1d, p.w2);
  const int s2 = tape.block_apply(hw, &batch.adj, &batch.offsets);
  const int h2 = tape.relu(tape.add_bias(s2, p.b2));

  ForwardIds out;
  out.h = tape.block_maxpool(h2, &batch.offsets);
  if (want_projection || classify_on_projection) {
    const int z1 = tape.relu(tape.add_bias(tape.matmul(out.h, p.wp1), p.bp1));
    out.z = tape.add_bias(tape.matmul(z1, p.wp2), p.bp2);
  }
  const int clf_in = classify_on_projection ? out.z : out.h;
  out.logits = tape.add_bias(tape.matmul(clf_in, p.wc), p.bc);
  return out;
}

std::pair<Tensor, Tensor> encoder_forward(const Tensor& adj, const Tensor& x_local,
                                          const ModelParams& params, double dropout_p,
                                          bool training, Rng& rng) {
  if (adj.rows != adj.cols || adj.rows != x_local.rows)
    throw Error("encoder_forward: adjacency/feature shape mismatch");
  if (x_local.cols != params.f_in()) throw Error("encoder_forward: feature width mismatch");
  Tape tape;
  const int w1 = tape.leaf(params.w1, false);
  const int b1 = tape.leaf(params.b1, false);
  const int w2 = tape.leaf(params.w2, false);
  const int b2 = tape.leaf(params.b2, false);
  const int x = tape.leaf(x_local, false);
  std::vector<Tensor> blocks{adj};
  std::vector<uint32_t> offsets{0, adj.rows};
  const int s1 = tape.block_apply(tape.matmul(x, w1), &blocks, &offsets);
  const int h1 = tape.relu(tape.add_bias(s1, b1));
  const int h1d = tape.dropout(h1, dropout_p, rng, training);
  const int s2 = tape.block_apply(tape.matmul(h1d, w2), &blocks, &offsets);
  const int h2 = tape.relu(tape.add_bias(s2, b2));
  const int pooled = tape.block_maxpool(h2, &offsets);
  return {tape.val(h2), tape.val(pooled)};
}

Tensor project(const Tensor& h, const ModelParams& params) {
  if (h.cols != params.hidden()) throw Error("project: input width mismatch");
  Tensor z1 = matmul(h, params.wp1);
  for (uint32_t i = 0; i < z1.rows; ++i) {
    double* r = z1.row(i);
    for (uint32_t j = 0; j < z1.cols; ++j) {
      r[j] += params.bp1.data[j];
      r[j] = r[j] > 0.0 ? r[j] : 0.0;
    }
  }
  Tensor z = matmul(z1, params.wp2);
  for (uint32_t i = 0; i < z.rows; ++i) {
    double* r = z.row(i);
    for (uint32_t j = 0; j < z.cols; ++j) r[j] += params.bp2.data[j];
  }
  return z;
}

Tensor classify(const Tensor& h, const ModelParams& params) {
  if (h.cols != params.hidden()) throw Error("classify: input width mismatch");
  Tensor logits = matmul(h, params.wc);
  for (uint32_t i = 0; i < logits.rows; ++i) {
    double* r = logits.row(i);
    for (uint32_t j = 0; j < logits.cols; ++j) r[j] += params.bc.data[j];
  }
  return logits;
}

void adam_step(ModelParams& params, const std::vector<Tensor>& grads, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
  auto tensors = params.named();
  if (grads.size() != tensors.size()) throw Error("adam_step: gradient count mismatch");
  if (state.m.empty()) {
    for (const auto& [name, t] : tensors) {
      state.m.emplace_back(t->rows, t->cols);
      state.v.emplace_back(t->rows, t->cols);
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < tensors.size(); ++i) {
    auto& [name, t] = tensors[i];
    const Tensor& g = grads[i];
    if (!g.same_shape(*t)) throw Error(std::string("adam_step: shape mismatch for ") + name);
    if (!all_finite(g)) throw Error(std::string("adam_step: non-finite gradient for ") + name);
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (size_t j = 0; j < t->data.size(); ++j) {
      m.data[j] = beta1 * m.data[j] + (1.0 - beta1) * g.data[j];
      v.data[j] = beta2 * v.data[j] + (1.0 - beta2) * g.data[j] * g.data[j];
      const double mhat = m.data[j] / bc1;
      const double vhat = v.data[j] / bc2;
      t->data[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

void save_model(const ModelParams& params, const std::string& path) {
  BinaryWriter w(path);
  w.magic(kModelMagic, kModelVersion);
  const auto tensors = params.named();
  w.u32(static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    w.str(name);
    w.u32(t->rows);
    w.u32(t->cols);
    for (const double v : t->data) w.f64(v);
  }
  w.close();
}

ModelParams load_model(const std::string& path) {
  BinaryReader r(path);
  const uint32_t version = r.expect_magic(kModelMagic);
  if (version != kModelVersion) throw Error("unsupported checkpoint version in '" + path + "'");
  ModelParams p;
  auto tensors = p.named();
  const uint32_t count = r.u32();
  if (count != tensors.size()) throw Error("checkpoint tensor count mismatch in '" + path + "'");
  for (auto& [name, t] : tensors) {
    const std::string got = r.str();
    if (got != name)
      throw Error("checkpoint tensor order mismatch in '" + path + "': expected " +
                  std::string(name) + ", got " + got);
    const uint32_t rows = r.u32();
    const uint32_t cols = r.u32();
    *t = Tensor(rows, cols);
    for (double& v : t->data) v = r.f64();
  }
  if (!r.at_end()) throw Error("trailing bytes in '" + path + "'");
  return p;
}

}  // namespace graphid
