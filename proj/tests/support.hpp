#pragma once

// Shared helpers for the test binaries: independent reference implementations
// (coarsening, neighborhood sampling, losses, manual features) plus random
// input generators. Everything here is deliberately written in the most
// literal way possible, favoring obviousness over speed, so disagreements
// point at the library.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphid/baseline.hpp"
#include "graphid/common.hpp"
#include "graphid/config.hpp"
#include "graphid/graph.hpp"
#include "graphid/record.hpp"
#include "graphid/sampling.hpp"
#include "graphid/tensor.hpp"

namespace testsupport {

/// Path of the command-line binary, set by the test runner via --bin=PATH.
extern std::string g_cli_bin;

// ---------------------------------------------------------------- ledgers

struct LedgerSpec {
  uint32_t max_accounts = 50;
  uint32_t max_records = 10000;
  uint32_t min_records = 1;
  double call_fraction = 0.35;  // P(record is a contract call)
  double self_fraction = 0.03;  // P(from == to)
  bool allow_role_conflicts = true;
};

/// Random well-formed records (every row passes the parser's checks).
std::vector<graphid::InteractionRecord> random_ledger(graphid::Rng& rng, const LedgerSpec& spec);

// ------------------------------------------------- coarsening reference

struct OracleGraph {
  // account id -> is-contract after any-flag-wins resolution
  std::map<std::string, bool> roles;
  // (from, to) -> (interaction count, exact transfer-value sum in wei)
  std::map<std::pair<std::string, std::string>, std::pair<uint64_t, unsigned __int128>> edges;
  // EOA caller -> contract -> call count
  std::map<std::string, std::map<std::string, uint64_t>> calls;
  // contract -> total calls received (any caller)
  std::map<std::string, uint64_t> call_totals;
};

OracleGraph oracle_coarsen(const std::vector<graphid::InteractionRecord>& records);

/// Compares nodes, roles, edge multiset and adjacency ordering invariants.
/// Returns an empty string on success, else a description of the first
/// mismatch.
std::string compare_graph(const graphid::LwAig& got, const OracleGraph& want);

/// Compares contract columns and materialized feature rows under `opts`.
std::string compare_features(const graphid::LwAig& got, const OracleGraph& want,
                             const graphid::FeatureOptions& opts);

// -------------------------------------------------- sampling reference

struct SubgraphExpect {
  std::vector<uint32_t> nodes;  // global indexes, sorted
  // (global src, global dst) -> (t, w_tilde)
  std::map<std::pair<uint32_t, uint32_t>, std::pair<uint64_t, unsigned __int128>> edges;
};

/// Literal Topk-BFS over the graph's edge list: ranks neighbors by the
/// attribute summed across both orientations (a self-loop counts once),
/// descending, ties by ascending index; h rounds; induced edges.
SubgraphExpect oracle_sample(const graphid::LwAig& g, uint32_t center, uint32_t h, uint32_t k,
                             graphid::RankAttr attr);

/// Checks node set, center placement, induced edges and feature rows.
std::string compare_subgraph(const graphid::LwAig& g, const graphid::AccountSubgraph& got,
                             const SubgraphExpect& want, uint32_t center);

// ------------------------------------------------------ loss references

/// Direct double-loop form: mean over anchors i of
/// -s(i,i)/tau + log(sum_{j != i} exp(s(i,j)/tau)), s = cosine similarity.
double naive_contrastive(const graphid::Tensor& z1, const graphid::Tensor& z2, double tau);

/// Conventional form over the stacked 2n rows; positives kept in the
/// denominator.
double naive_contrastive_standard(const graphid::Tensor& z1, const graphid::Tensor& z2,
                                  double tau);

double naive_cross_entropy(const graphid::Tensor& logits, const std::vector<uint8_t>& labels);

// ------------------------------------------- manual feature reference

/// Independent re-derivation of the 16 per-account descriptors.
std::vector<double> oracle_manual_features(const std::vector<graphid::InteractionRecord>& records,
                                           const std::string& account);

// ------------------------------------------------------- random inputs

graphid::Tensor random_tensor(graphid::Rng& rng, uint32_t rows, uint32_t cols, double lo,
                              double hi);

/// A random small subgraph: 1..max_nodes nodes, random sparse symmetric-ish
/// topology with t >= 1, random sparse non-negative feature rows, label set.
graphid::AccountSubgraph random_subgraph(graphid::Rng& rng, uint32_t max_nodes,
                                         uint32_t feat_width, uint8_t label);

// ------------------------------------------------------- FD gradcheck

struct GradCheckReport {
  double max_rel_err = 0.0;
  size_t coords_checked = 0;
  double loss = 0.0;
};

/// Joint-loss gradient check on one batch of subgraphs: analytic gradients
/// from the tape versus central finite differences with the given step.
/// Dropout masks and augmentation draws are re-seeded identically for every
/// evaluation, so the objective is a fixed deterministic function of the
/// parameters. Checks every coordinate of every parameter tensor.
GradCheckReport fd_gradcheck(const std::vector<graphid::AccountSubgraph>& batch,
                             uint32_t feat_width, uint32_t hidden, double dropout_p,
                             double lambda, double tau, uint64_t seed, double step);

}  // namespace testsupport
