#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphid/graph.hpp"

namespace graphid {

enum class RankAttr : uint8_t { T = 0, WTilde = 1 };

RankAttr parse_rank_attr(const std::string& text);
std::string to_string(RankAttr attr);

/// An h-hop Topk-induced subgraph around one target account. Node 0 is the
/// center; edges use local indexes; feature rows are sparse (column, value)
/// pairs with the graph's scaling already applied.
struct AccountSubgraph {
  uint32_t center = 0;
  std::vector<uint32_t> node_map;  // local index -> global node index
  std::vector<CoarseEdge> edges;   // src/dst are local indexes
  uint32_t feat_width = 0;
  std::vector<std::vector<std::pair<uint32_t, double>>> feat_rows;  // per local node
  std::optional<uint8_t> label;

  uint32_t size() const { return static_cast<uint32_t>(node_map.size()); }
  bool operator==(const AccountSubgraph&) const = default;
};

/// Up to k neighbors of v ranked by the chosen attribute summed over both
/// orientations (a self-loop counts once), descending, ties broken by
/// ascending global index.
std::vector<uint32_t> topk_neighbors(const LwAig& graph, uint32_t v, RankAttr attr, uint32_t k);

/// Frontier expansion for h rounds starting at {v}; nodes already collected
/// are never re-added or re-expanded; the result is the LwAig-induced
/// subgraph on the collected set. |V| <= sum_{j=0..h} k^j.
AccountSubgraph sample_subgraph(const LwAig& graph, uint32_t v, uint32_t h, uint32_t k,
                                RankAttr attr);

/// A balanced binary dataset of account subgraphs, ordered by account id.
struct LabeledDataset {
  std::string positive_class;
  RankAttr attr = RankAttr::T;
  uint32_t h = 0;
  uint32_t k = 0;
  uint64_t seed = 0;
  uint32_t feat_width = 0;
  std::vector<AccountSubgraph> subgraphs;  // label set on every entry
  std::vector<std::string> accounts;       // center account ids, aligned
};

/// One subgraph per positive account (label 1) plus an equal number of
/// negatives drawn uniformly without replacement from the pool (label 0).
LabeledDataset build_labeled_dataset(const LwAig& graph, const std::vector<uint32_t>& positives,
                                     const std::vector<uint32_t>& negative_pool,
                                     const std::string& positive_class, uint32_t h, uint32_t k,
                                     RankAttr attr, uint64_t seed);

/// Binary subgraph pack (bit-exact round-trip) plus a text manifest at
/// `path + ".manifest"` with one "account,label,nodes,edges" line per entry.
void save_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

}  // namespace graphid
