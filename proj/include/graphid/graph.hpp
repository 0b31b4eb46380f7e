#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphid/fixed.hpp"
#include "graphid/record.hpp"

namespace graphid {

/// One coarsened directed edge: all raw interactions between an ordered pair
/// merged into an interaction count t and an exact transaction-amount sum
/// w_tilde (contract calls contribute to t only).
struct CoarseEdge {
  uint32_t src = 0;
  uint32_t dst = 0;
  uint64_t t = 0;
  Amount w_tilde;

  bool operator==(const CoarseEdge&) const = default;
};

enum class FeatureScale : uint8_t { Count = 0, Binary = 1, Log1p = 2 };

FeatureScale parse_feature_scale(const std::string& text);
std::string to_string(FeatureScale scale);

struct FeatureOptions {
  FeatureScale scale = FeatureScale::Count;
  bool is_contract_column = false;  // append a binary CA indicator column
  uint32_t min_contract_calls = 0;  // drop contract columns with fewer total calls

  bool operator==(const FeatureOptions&) const = default;
};

/// The coarsened account interaction graph: dense node indexes over
/// lexicographically sorted account ids, per-node roles, CSR adjacency in
/// both orientations, and sparse per-node contract-call feature rows.
struct LwAig {
  std::vector<std::string> node_ids;  // index -> account id, sorted ascending
  std::vector<Role> roles;

  // Out-orientation CSR: edges grouped by src, dst ascending within a group.
  std::vector<uint64_t> out_offsets;  // size n+1
  std::vector<CoarseEdge> edges;
  // In-orientation index: positions into `edges` grouped by dst, src ascending.
  std::vector<uint64_t> in_offsets;  // size n+1
  std::vector<uint64_t> in_edges;

  // Contract-call features (raw call counts; scaling applied at materialization).
  std::vector<std::string> contract_ids;  // column -> contract account id, sorted
  std::vector<uint64_t> feat_offsets;     // size n+1 into feat_cols/feat_counts
  std::vector<uint32_t> feat_cols;
  std::vector<uint32_t> feat_counts;
  FeatureOptions feat_opts;

  uint32_t node_count() const { return static_cast<uint32_t>(node_ids.size()); }
  uint64_t edge_count() const { return edges.size(); }
  /// Width of materialized feature rows (contract columns + optional CA flag).
  uint32_t feature_width() const {
    return static_cast<uint32_t>(contract_ids.size()) + (feat_opts.is_contract_column ? 1 : 0);
  }
  std::optional<uint32_t> find_node(const std::string& id) const;

  /// Materializes the feature row of node v as (column, value) pairs with the
  /// configured scaling applied; columns ascending.
  std::vector<std::pair<uint32_t, double>> feature_row(uint32_t v) const;
};

/// Builds nodes, roles, and coarsened edges from raw records. Feature rows are
/// installed separately by build_contract_features.
LwAig build_lw_aig(const std::vector<InteractionRecord>& records);

/// Assigns contract columns (lexicographic id order, optionally filtered by a
/// minimum total call count) and installs per-EOA call-count rows.
void build_contract_features(const std::vector<InteractionRecord>& records, LwAig& graph,
                             const FeatureOptions& opts = {});

/// Convenience: build_lw_aig followed by build_contract_features.
LwAig build_graph(const std::vector<InteractionRecord>& records, const FeatureOptions& opts = {});

enum class Direction : uint8_t { Out, In, Both };

/// Adjacency of v in the requested direction; Both lists out-edges then
/// in-edges (per-orientation edges kept distinct). Pairs are (neighbor, edge).
std::vector<std::pair<uint32_t, const CoarseEdge*>> neighbors(const LwAig& graph, uint32_t v,
                                                              Direction dir);

/// Binary graph snapshot; round-trips bit-exactly.
void save_graph(const LwAig& graph, const std::string& path);
LwAig load_graph(const std::string& path);

}  // namespace graphid
