#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphid/config.hpp"
#include "graphid/model.hpp"
#include "graphid/objective.hpp"
#include "graphid/sampling.hpp"
#include "graphid/tensor.hpp"

namespace graphid {

/// Binary classification report; the positive class is label 1.
struct FoldStats {
  double precision = 0, recall = 0, f1 = 0, macro_f1 = 0, accuracy = 0;
  uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};
FoldStats score_binary(const std::vector<uint8_t>& truth, const std::vector<uint8_t>& pred);

struct TrainResult {
  ModelParams params;
  std::vector<LossReport> history;  // per-epoch batch averages
};

/// Joint training on the given dataset ordinals. Gradient descent is fully
/// deterministic given (dataset, config, run_seed): shuffles, dropout and the
/// per-(ordinal, view) augmentation streams all derive from run_seed.
TrainResult train_model(const LabeledDataset& ds, const std::vector<uint32_t>& train_idx,
                        const TrainConfig& cfg, uint64_t run_seed);

/// Argmax predictions (no dropout), aligned with idx.
std::vector<uint8_t> predict(const ModelParams& params, const LabeledDataset& ds,
                             const std::vector<uint32_t>& idx, const TrainConfig& cfg);

/// Pooled encoder embeddings for every subgraph, row i = dataset ordinal i.
Tensor embed_all(const ModelParams& params, const LabeledDataset& ds, const TrainConfig& cfg);

/// Shuffles each class separately with Rng(seed) and deals round-robin;
/// errors when any fold misses a class. Folds are returned sorted.
std::vector<std::vector<uint32_t>> stratified_folds(const std::vector<uint8_t>& labels,
                                                    uint32_t folds, uint64_t seed);

struct RunRecord {
  uint32_t repeat = 0;
  uint32_t fold = 0;
  uint64_t run_seed = 0;
  FoldStats stats;
};

struct CrossvalResult {
  std::vector<RunRecord> runs;
  double f1_mean = 0, f1_std = 0;
  double macro_f1_mean = 0, macro_f1_std = 0;
  double accuracy_mean = 0, accuracy_std = 0;
};

/// repeats × folds fresh-initialization runs; summary is mean and sample
/// standard deviation (n-1) over all runs.
CrossvalResult cross_validate(const LabeledDataset& ds, const TrainConfig& cfg);

/// Same protocol over fixed feature rows: per-run z-scoring fitted on the
/// train fold followed by L2-regularized logistic regression.
CrossvalResult cross_validate_features(const Tensor& features, const std::vector<uint8_t>& labels,
                                       const TrainConfig& cfg);

/// Deterministic metrics files: sorted keys, two-space indent, trailing
/// newline. Identical inputs produce byte-identical output.
void write_crossval_metrics(const std::string& path, const std::string& kind,
                            const TrainConfig& cfg, const std::string& dataset_path,
                            const LabeledDataset* ds, const CrossvalResult& res);
void write_train_metrics(const std::string& path, const TrainConfig& cfg,
                         const std::string& dataset_path, const LabeledDataset& ds,
                         uint64_t run_seed, const std::vector<LossReport>& history,
                         const FoldStats& fit);

/// First two principal components (column-centered, eigenvectors of the
/// sample covariance via cyclic Jacobi); component sign is fixed so the
/// largest-magnitude loading is positive.
Tensor pca2(const Tensor& x);

/// TSV export: account, label, then either all embedding dimensions or two
/// principal components.
void export_embeddings(const std::string& path, const ModelParams& params,
                       const LabeledDataset& ds, const TrainConfig& cfg, bool pca);

}  // namespace graphid
