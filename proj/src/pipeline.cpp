#include "graphid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "graphid/augment.hpp"
#include "graphid/baseline.hpp"
#include "graphid/common.hpp"
#include "graphid/tape.hpp"

namespace graphid {
namespace {

constexpr uint64_t kEpochStream = 0x65706f63;  // batch order
constexpr uint64_t kViewStream = 0x76696577;   // augmentation draws
constexpr uint64_t kDropStream = 0x64726f70;   // dropout draws
constexpr uint64_t kFoldStream = 0x666f6c64;   // fold assignment

double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

struct MeanStd {
  double mean = 0, std = 0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= double(xs.size());
  if (xs.size() < 2) return r;
  double acc = 0;
  for (double x : xs) acc += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(acc / double(xs.size() - 1));
  return r;
}

void check_indices(const LabeledDataset& ds, const std::vector<uint32_t>& idx) {
  for (uint32_t i : idx) {
    if (i >= ds.subgraphs.size()) throw Error("index out of range in dataset");
    if (!ds.subgraphs[i].label) throw Error("dataset entry missing label");
  }
}

uint8_t argmax2(const double* row, size_t n) {
  size_t best = 0;
  for (size_t j = 1; j < n; ++j)
    if (row[j] > row[best]) best = j;
  return uint8_t(best);
}

nlohmann::json run_json(const RunRecord& r) {
  nlohmann::json j;
  j["repeat"] = r.repeat;
  j["fold"] = r.fold;
  j["run_seed"] = r.run_seed;
  j["precision"] = r.stats.precision;
  j["recall"] = r.stats.recall;
  j["f1"] = r.stats.f1;
  j["macro_f1"] = r.stats.macro_f1;
  j["accuracy"] = r.stats.accuracy;
  j["tp"] = r.stats.tp;
  j["fp"] = r.stats.fp;
  j["fn"] = r.stats.fn;
  j["tn"] = r.stats.tn;
  return j;
}

nlohmann::json dataset_json(const std::string& path, const LabeledDataset& ds) {
  size_t pos = 0;
  for (const auto& g : ds.subgraphs)
    if (g.label && *g.label == 1) pos++;
  nlohmann::json j;
  j["path"] = path;
  j["subgraphs"] = ds.subgraphs.size();
  j["positives"] = pos;
  j["positive_class"] = ds.positive_class;
  j["feature_width"] = ds.feat_width;
  j["h"] = ds.h;
  j["k"] = ds.k;
  j["attr"] = to_string(ds.attr);
  j["sample_seed"] = ds.seed;
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  out.close();
  if (!out) throw Error("write failed: " + path);
}

void summarize(CrossvalResult& res) {
  std::vector<double> f1, mf1, acc;
  for (const auto& r : res.runs) {
    f1.push_back(r.stats.f1);
    mf1.push_back(r.stats.macro_f1);
    acc.push_back(r.stats.accuracy);
  }
  auto a = mean_std(f1);
  auto b = mean_std(mf1);
  auto c = mean_std(acc);
  res.f1_mean = a.mean;
  res.f1_std = a.std;
  res.macro_f1_mean = b.mean;
  res.macro_f1_std = b.std;
  res.accuracy_mean = c.mean;
  res.accuracy_std = c.std;
}

}  // namespace

FoldStats score_binary(const std::vector<uint8_t>& truth, const std::vector<uint8_t>& pred) {
  if (truth.size() != pred.size()) throw Error("score_binary: length mismatch");
  FoldStats s;
  for (size_t i = 0; i < truth.size(); ++i) {
    bool t = truth[i] != 0, p = pred[i] != 0;
    if (t && p) s.tp++;
    else if (!t && p) s.fp++;
    else if (t && !p) s.fn++;
    else s.tn++;
  }
  s.precision = safe_div(double(s.tp), double(s.tp + s.fp));
  s.recall = safe_div(double(s.tp), double(s.tp + s.fn));
  s.f1 = safe_div(2 * s.precision * s.recall, s.precision + s.recall);
  double p0 = safe_div(double(s.tn), double(s.tn + s.fn));
  double r0 = safe_div(double(s.tn), double(s.tn + s.fp));
  double f0 = safe_div(2 * p0 * r0, p0 + r0);
  s.macro_f1 = 0.5 * (s.f1 + f0);
  s.accuracy = safe_div(double(s.tp + s.tn), double(truth.size()));
  return s;
}

TrainResult train_model(const LabeledDataset& ds, const std::vector<uint32_t>& train_idx,
                        const TrainConfig& cfg, uint64_t run_seed) {
  if (train_idx.empty()) throw Error("train: empty index set");
  if (ds.feat_width == 0) throw Error("train: dataset has no feature columns");
  check_indices(ds, train_idx);

  TrainResult out;
  out.params = ModelParams::init(ds.feat_width, cfg.model_hidden, 2, run_seed);
  AdamState adam;
  Rng drop_rng(mix_seed(run_seed, kDropStream));

  // lambda = 0 with identity views collapses the three prediction terms into
  // one: the views equal the originals and dropout is resampled per pass, so
  // we train on a single cross-entropy pass and report it for all three.
  const bool single_pass = cfg.lambda == 0.0 && cfg.view1.op == AugmentOp::Identity &&
                           cfg.view2.op == AugmentOp::Identity;

  std::vector<Tensor> adj_cache(ds.subgraphs.size());
  std::vector<char> cached(ds.subgraphs.size(), 0);
  auto cache_adj = [&](uint32_t i) -> const Tensor* {
    if (!cached[i]) {
      adj_cache[i] = normalize_adjacency(ds.subgraphs[i], cfg.weighted_adjacency);
      cached[i] = 1;
    }
    return &adj_cache[i];
  };

  bool warned_small = false;
  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<uint32_t> order(train_idx);
    Rng order_rng(mix_seed(run_seed, kEpochStream, epoch));
    order_rng.shuffle(order);
    const uint64_t view_seed =
        mix_seed(run_seed, kViewStream, cfg.freeze_views ? 0 : epoch);

    LossReport esum;
    uint32_t nb = 0;
    for (size_t pos = 0; pos < order.size(); pos += cfg.batch_size) {
      const size_t end = std::min(pos + cfg.batch_size, order.size());
      std::vector<uint32_t> batch(order.begin() + pos, order.begin() + end);
      const size_t m = batch.size();

      std::vector<const AccountSubgraph*> orig(m);
      std::vector<const Tensor*> orig_adj(m);
      for (size_t j = 0; j < m; ++j) {
        orig[j] = &ds.subgraphs[batch[j]];
        orig_adj[j] = cache_adj(batch[j]);
      }
      BatchPlan plan_d = build_batch(orig, ds.feat_width, cfg.weighted_adjacency, &orig_adj);

      Tape tape;
      ParamIds pid = add_params(tape, out.params);
      LossReport rep;
      int loss_id;
      // view storage must outlive tape.backward(), which reads the adjacency
      // blocks through pointers
      std::vector<AccountSubgraph> v1(m), v2(m);
      BatchPlan plan_1, plan_2;

      if (single_pass) {
        ForwardIds fd = model_forward(tape, pid, plan_d, cfg.model_dropout, true, drop_rng,
                                      false, cfg.classify_on_projection);
        loss_id = tape.cross_entropy(fd.logits, plan_d.labels);
        rep.l_d = rep.l_aug1 = rep.l_aug2 = tape.val(loss_id).data[0];
        rep.l_pred = rep.l_total = rep.l_d;
      } else {
        ForwardIds fd = model_forward(tape, pid, plan_d, cfg.model_dropout, true, drop_rng,
                                      false, cfg.classify_on_projection);
        int ce_d = tape.cross_entropy(fd.logits, plan_d.labels);

        std::vector<const AccountSubgraph*> p1(m), p2(m);
        std::vector<const Tensor*> a1(m), a2(m);
        for (size_t j = 0; j < m; ++j) {
          const uint32_t i = batch[j];
          Rng r1 = view_rng(view_seed, i, 1);
          Rng r2 = view_rng(view_seed, i, 2);
          v1[j] = apply_augment(ds.subgraphs[i], cfg.view1, r1, cfg.per_node_mask);
          v2[j] = apply_augment(ds.subgraphs[i], cfg.view2, r2, cfg.per_node_mask);
          p1[j] = &v1[j];
          p2[j] = &v2[j];
          // masking keeps the topology, so the cached adjacency stays valid
          a1[j] = cfg.view1.op == AugmentOp::NodeDrop ? nullptr : cache_adj(i);
          a2[j] = cfg.view2.op == AugmentOp::NodeDrop ? nullptr : cache_adj(i);
        }
        plan_1 = build_batch(p1, ds.feat_width, cfg.weighted_adjacency, &a1);
        plan_2 = build_batch(p2, ds.feat_width, cfg.weighted_adjacency, &a2);
        ForwardIds f1 = model_forward(tape, pid, plan_1, cfg.model_dropout, true, drop_rng,
                                      true, cfg.classify_on_projection);
        ForwardIds f2 = model_forward(tape, pid, plan_2, cfg.model_dropout, true, drop_rng,
                                      true, cfg.classify_on_projection);
        int ce_1 = tape.cross_entropy(f1.logits, plan_1.labels);
        int ce_2 = tape.cross_entropy(f2.logits, plan_2.labels);
        const double third = 1.0 / 3.0;
        int l_pred = tape.lincomb({{third, ce_d}, {third, ce_1}, {third, ce_2}});
        if (m >= 2) {
          int z1 = tape.normalize_rows(f1.z);
          int z2 = tape.normalize_rows(f2.z);
          int l_self;
          if (cfg.standard_ntxent) {
            int all = tape.concat_rows(z1, z2);
            l_self = tape.contrastive_incl(tape.matmul_nt(all, all), cfg.tau);
          } else {
            l_self = tape.contrastive_excl(tape.matmul_nt(z1, z2), cfg.tau);
          }
          loss_id = tape.lincomb({{1.0, l_pred}, {cfg.lambda, l_self}});
          rep.l_self = tape.val(l_self).data[0];
        } else {
          if (!warned_small) {
            std::cerr << "warning: batch of 1 subgraph, contrastive term skipped\n";
            warned_small = true;
          }
          loss_id = l_pred;
          rep.contrast_skipped = true;
        }
        rep.l_d = tape.val(ce_d).data[0];
        rep.l_aug1 = tape.val(ce_1).data[0];
        rep.l_aug2 = tape.val(ce_2).data[0];
        rep.l_pred = tape.val(l_pred).data[0];
        rep.l_total = tape.val(loss_id).data[0];
      }

      tape.backward(loss_id);
      adam_step(out.params, param_grads(tape, pid), adam, cfg.lr);

      esum.l_self += rep.l_self;
      esum.l_pred += rep.l_pred;
      esum.l_total += rep.l_total;
      esum.l_d += rep.l_d;
      esum.l_aug1 += rep.l_aug1;
      esum.l_aug2 += rep.l_aug2;
      esum.contrast_skipped = esum.contrast_skipped || rep.contrast_skipped;
      nb++;
    }
    LossReport avg = esum;
    const double inv = 1.0 / double(nb);
    avg.l_self *= inv;
    avg.l_pred *= inv;
    avg.l_total *= inv;
    avg.l_d *= inv;
    avg.l_aug1 *= inv;
    avg.l_aug2 *= inv;
    out.history.push_back(avg);
  }
  return out;
}

std::vector<uint8_t> predict(const ModelParams& params, const LabeledDataset& ds,
                             const std::vector<uint32_t>& idx, const TrainConfig& cfg) {
  for (uint32_t i : idx)
    if (i >= ds.subgraphs.size()) throw Error("index out of range in dataset");
  std::vector<uint8_t> out;
  out.reserve(idx.size());
  Rng rng(0);  // dropout is inactive outside training
  for (size_t pos = 0; pos < idx.size(); pos += cfg.batch_size) {
    const size_t end = std::min(pos + cfg.batch_size, idx.size());
    std::vector<const AccountSubgraph*> graphs;
    for (size_t j = pos; j < end; ++j) graphs.push_back(&ds.subgraphs[idx[j]]);
    BatchPlan plan = build_batch(graphs, ds.feat_width, cfg.weighted_adjacency);
    Tape tape;
    ParamIds pid = add_params(tape, params);
    ForwardIds f = model_forward(tape, pid, plan, cfg.model_dropout, false, rng, false,
                                 cfg.classify_on_projection);
    const Tensor& logits = tape.val(f.logits);
    for (size_t r = 0; r < logits.rows; ++r) out.push_back(argmax2(logits.row(r), logits.cols));
  }
  return out;
}

Tensor embed_all(const ModelParams& params, const LabeledDataset& ds, const TrainConfig& cfg) {
  Tensor emb = Tensor::zeros(ds.subgraphs.size(), params.hidden());
  Rng rng(0);
  size_t row = 0;
  for (size_t pos = 0; pos < ds.subgraphs.size(); pos += cfg.batch_size) {
    const size_t end = std::min(pos + size_t(cfg.batch_size), ds.subgraphs.size());
    std::vector<const AccountSubgraph*> graphs;
    for (size_t j = pos; j < end; ++j) graphs.push_back(&ds.subgraphs[j]);
    BatchPlan plan = build_batch(graphs, ds.feat_width, cfg.weighted_adjacency);
    Tape tape;
    ParamIds pid = add_params(tape, params);
    ForwardIds f = model_forward(tape, pid, plan, cfg.model_dropout, false, rng, false, false);
    const Tensor& h = tape.val(f.h);
    for (size_t r = 0; r < h.rows; ++r, ++row)
      std::copy(h.row(r), h.row(r) + h.cols, emb.row(row));
  }
  return emb;
}

std::vector<std::vector<uint32_t>> stratified_folds(const std::vector<uint8_t>& labels,
                                                    uint32_t folds, uint64_t seed) {
  if (folds < 2) throw Error("stratified_folds: need at least 2 folds");
  std::vector<uint32_t> pos, neg;
  for (uint32_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::vector<uint32_t>> out(folds);
  for (size_t i = 0; i < pos.size(); ++i) out[i % folds].push_back(pos[i]);
  for (size_t i = 0; i < neg.size(); ++i) out[i % folds].push_back(neg[i]);
  if (pos.size() < folds || neg.size() < folds)
    throw Error("stratified_folds: a class has fewer members than folds");
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

CrossvalResult cross_validate(const LabeledDataset& ds, const TrainConfig& cfg) {
  std::vector<uint8_t> labels;
  for (const auto& g : ds.subgraphs) {
    if (!g.label) throw Error("dataset entry missing label");
    labels.push_back(*g.label);
  }
  CrossvalResult res;
  for (uint32_t repeat = 0; repeat < cfg.repeats; ++repeat) {
    auto folds = stratified_folds(labels, cfg.folds, mix_seed(cfg.seed, kFoldStream, repeat));
    // partition audit: folds must be disjoint and cover the dataset
    std::vector<char> seen(labels.size(), 0);
    for (const auto& f : folds)
      for (uint32_t i : f) {
        if (seen[i]) throw Error("fold audit: duplicate index");
        seen[i] = 1;
      }
    for (char c : seen)
      if (!c) throw Error("fold audit: uncovered index");

    for (uint32_t f = 0; f < cfg.folds; ++f) {
      std::vector<uint32_t> train;
      for (uint32_t g = 0; g < cfg.folds; ++g)
        if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
      std::sort(train.begin(), train.end());
      const uint64_t run_seed = mix_seed(cfg.seed, repeat, f);
      TrainResult tr = train_model(ds, train, cfg, run_seed);
      std::vector<uint8_t> pred = predict(tr.params, ds, folds[f], cfg);
      std::vector<uint8_t> truth;
      for (uint32_t i : folds[f]) truth.push_back(labels[i]);
      res.runs.push_back(RunRecord{repeat, f, run_seed, score_binary(truth, pred)});
    }
  }
  summarize(res);
  return res;
}

CrossvalResult cross_validate_features(const Tensor& features, const std::vector<uint8_t>& labels,
                                       const TrainConfig& cfg) {
  if (features.rows != labels.size()) throw Error("feature/label count mismatch");
  CrossvalResult res;
  for (uint32_t repeat = 0; repeat < cfg.repeats; ++repeat) {
    auto folds = stratified_folds(labels, cfg.folds, mix_seed(cfg.seed, kFoldStream, repeat));
    for (uint32_t f = 0; f < cfg.folds; ++f) {
      std::vector<uint32_t> train;
      for (uint32_t g = 0; g < cfg.folds; ++g)
        if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
      std::sort(train.begin(), train.end());

      Tensor xtr = Tensor::zeros(train.size(), features.cols);
      std::vector<uint8_t> ytr;
      for (size_t j = 0; j < train.size(); ++j) {
        std::copy(features.row(train[j]), features.row(train[j]) + features.cols, xtr.row(j));
        ytr.push_back(labels[train[j]]);
      }
      Standardizer sc;
      sc.fit(xtr);
      LogisticModel lm = logistic_fit(sc.transform(xtr), ytr);

      Tensor xte = Tensor::zeros(folds[f].size(), features.cols);
      std::vector<uint8_t> truth;
      for (size_t j = 0; j < folds[f].size(); ++j) {
        std::copy(features.row(folds[f][j]), features.row(folds[f][j]) + features.cols,
                  xte.row(j));
        truth.push_back(labels[folds[f][j]]);
      }
      Tensor xs = sc.transform(xte);
      std::vector<uint8_t> pred;
      for (size_t j = 0; j < xs.rows; ++j)
        pred.push_back(lm.predict_proba(xs.row(j), xs.cols) >= 0.5 ? 1 : 0);
      res.runs.push_back(
          RunRecord{repeat, f, mix_seed(cfg.seed, repeat, f), score_binary(truth, pred)});
    }
  }
  summarize(res);
  return res;
}

void write_crossval_metrics(const std::string& path, const std::string& kind,
                            const TrainConfig& cfg, const std::string& dataset_path,
                            const LabeledDataset* ds, const CrossvalResult& res) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = kind;
  j["config"] = config_items(cfg);
  if (ds) j["dataset"] = dataset_json(dataset_path, *ds);
  else j["dataset"] = {{"path", dataset_path}};
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : res.runs) runs.push_back(run_json(r));
  j["runs"] = runs;
  j["summary"] = {{"runs", res.runs.size()},
                  {"f1_mean", res.f1_mean},
                  {"f1_std", res.f1_std},
                  {"macro_f1_mean", res.macro_f1_mean},
                  {"macro_f1_std", res.macro_f1_std},
                  {"accuracy_mean", res.accuracy_mean},
                  {"accuracy_std", res.accuracy_std}};
  write_json(path, j);
}

void write_train_metrics(const std::string& path, const TrainConfig& cfg,
                         const std::string& dataset_path, const LabeledDataset& ds,
                         uint64_t run_seed, const std::vector<LossReport>& history,
                         const FoldStats& fit) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "train";
  j["config"] = config_items(cfg);
  j["dataset"] = dataset_json(dataset_path, ds);
  j["run_seed"] = run_seed;
  nlohmann::json hist = nlohmann::json::array();
  for (size_t e = 0; e < history.size(); ++e) {
    const auto& h = history[e];
    hist.push_back({{"epoch", e},
                    {"l_total", h.l_total},
                    {"l_pred", h.l_pred},
                    {"l_self", h.l_self},
                    {"l_d", h.l_d},
                    {"l_aug1", h.l_aug1},
                    {"l_aug2", h.l_aug2}});
  }
  j["history"] = hist;
  j["train_fit"] = {{"precision", fit.precision}, {"recall", fit.recall},
                    {"f1", fit.f1},               {"macro_f1", fit.macro_f1},
                    {"accuracy", fit.accuracy},   {"tp", fit.tp},
                    {"fp", fit.fp},               {"fn", fit.fn},
                    {"tn", fit.tn}};
  write_json(path, j);
}

Tensor pca2(const Tensor& x) {
  if (x.rows < 2) throw Error("pca2: need at least 2 rows");
  const size_t n = x.rows, d = x.cols;
  Tensor xc = x;
  for (size_t j = 0; j < d; ++j) {
    double mu = 0;
    for (size_t i = 0; i < n; ++i) mu += xc.at(i, j);
    mu /= double(n);
    for (size_t i = 0; i < n; ++i) xc.at(i, j) -= mu;
  }
  Tensor cov = Tensor::zeros(d, d);
  gemm_tn_acc(xc, xc, cov);
  const double inv = 1.0 / double(n - 1);
  for (double& v : cov.data) v *= inv;

  // cyclic Jacobi eigensolver on the symmetric covariance
  Tensor v = Tensor::zeros(d, d);
  for (size_t i = 0; i < d; ++i) v.at(i, i) = 1.0;
  double fro = 0;
  for (double a : cov.data) fro += a * a;
  const double tol = 1e-24 * (1.0 + fro);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (size_t p = 0; p < d; ++p)
      for (size_t q = p + 1; q < d; ++q) off += cov.at(p, q) * cov.at(p, q);
    if (off <= tol) break;
    for (size_t p = 0; p < d; ++p)
      for (size_t q = p + 1; q < d; ++q) {
        const double apq = cov.at(p, q);
        if (apq == 0.0) continue;
        const double theta = (cov.at(q, q) - cov.at(p, p)) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (size_t i = 0; i < d; ++i) {
          const double aip = cov.at(i, p), aiq = cov.at(i, q);
          cov.at(i, p) = c * aip - s * aiq;
          cov.at(i, q) = s * aip + c * aiq;
        }
        for (size_t i = 0; i < d; ++i) {
          const double api = cov.at(p, i), aqi = cov.at(q, i);
          cov.at(p, i) = c * api - s * aqi;
          cov.at(q, i) = s * api + c * aqi;
        }
        for (size_t i = 0; i < d; ++i) {
          const double vip = v.at(i, p), viq = v.at(i, q);
          v.at(i, p) = c * vip - s * viq;
          v.at(i, q) = s * vip + c * viq;
        }
      }
  }
  std::vector<size_t> idx(d);
  for (size_t i = 0; i < d; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (cov.at(a, a) != cov.at(b, b)) return cov.at(a, a) > cov.at(b, b);
    return a < b;
  });
  const size_t keep = std::min<size_t>(2, d);
  Tensor w = Tensor::zeros(d, 2);
  for (size_t cidx = 0; cidx < keep; ++cidx) {
    const size_t src = idx[cidx];
    size_t peak = 0;
    for (size_t i = 1; i < d; ++i)
      if (std::fabs(v.at(i, src)) > std::fabs(v.at(peak, src))) peak = i;
    const double sign = v.at(peak, src) >= 0 ? 1.0 : -1.0;
    for (size_t i = 0; i < d; ++i) w.at(i, cidx) = sign * v.at(i, src);
  }
  return matmul(xc, w);
}

void export_embeddings(const std::string& path, const ModelParams& params,
                       const LabeledDataset& ds, const TrainConfig& cfg, bool pca) {
  if (ds.subgraphs.empty()) throw Error("export: empty dataset");
  Tensor emb = embed_all(params, ds, cfg);
  Tensor outm = pca ? pca2(emb) : emb;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "account\tlabel";
  if (pca) {
    out << "\tpc1\tpc2";
  } else {
    for (size_t j = 0; j < outm.cols; ++j) out << "\te" << j;
  }
  out << '\n';
  char buf[64];
  for (size_t i = 0; i < outm.rows; ++i) {
    out << ds.accounts[i] << '\t' << int(ds.subgraphs[i].label.value_or(0));
    for (size_t j = 0; j < outm.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.10g", outm.at(i, j));
      out << '\t' << buf;
    }
    out << '\n';
  }
  out.close();
  if (!out) throw Error("write failed: " + path);
}

}  // namespace graphid
