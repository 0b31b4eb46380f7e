#include "graphid/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "graphid/binio.hpp"
#include "graphid/common.hpp"

namespace graphid {

namespace {

constexpr char kGraphMagic[4] = {'B', 'G', 'C', 'G'};
constexpr uint32_t kGraphVersion = 1;

struct PairAccum {
  uint64_t t = 0;
  Amount w;
};

}  // namespace

FeatureScale parse_feature_scale(const std::string& text) {
  if (text == "count") return FeatureScale::Count;
  if (text == "binary") return FeatureScale::Binary;
  if (text == "log1p") return FeatureScale::Log1p;
  throw Error("unknown feature scale '" + text + "' (count|binary|log1p)");
}

std::string to_string(FeatureScale scale) {
  switch (scale) {
    case FeatureScale::Count: return "count";
    case FeatureScale::Binary: return "binary";
    case FeatureScale::Log1p: return "log1p";
  }
  throw Error("invalid feature scale");
}

std::optional<uint32_t> LwAig::find_node(const std::string& id) const {
  const auto it = std::lower_bound(node_ids.begin(), node_ids.end(), id);
  if (it == node_ids.end() || *it != id) return std::nullopt;
  return static_cast<uint32_t>(it - node_ids.begin());
}

std::vector<std::pair<uint32_t, double>> LwAig::feature_row(uint32_t v) const {
  if (v >= node_count()) throw Error("feature_row: node index out of range");
  std::vector<std::pair<uint32_t, double>> row;
  for (uint64_t i = feat_offsets[v]; i < feat_offsets[v + 1]; ++i) {
    const double c = static_cast<double>(feat_counts[i]);
    double value = c;
    switch (feat_opts.scale) {
      case FeatureScale::Count: value = c; break;
      case FeatureScale::Binary: value = c > 0.0 ? 1.0 : 0.0; break;
      case FeatureScale::Log1p: value = std::log1p(c); break;
    }
    row.emplace_back(feat_cols[i], value);
  }
  if (feat_opts.is_contract_column && roles[v] == Role::CA)
    row.emplace_back(static_cast<uint32_t>(contract_ids.size()), 1.0);
  return row;
}

LwAig build_lw_aig(const std::vector<InteractionRecord>& records) {
  LwAig g;
  const RoleMap role_map = account_roles(records);
  if (role_map.roles.size() > static_cast<size_t>(UINT32_MAX) - 1)
    throw Error("account count overflows the 32-bit node index");

  g.node_ids.reserve(role_map.roles.size());
  g.roles.reserve(role_map.roles.size());
  std::unordered_map<std::string, uint32_t> index;
  index.reserve(role_map.roles.size() * 2);
  for (const auto& [id, role] : role_map.roles) {  // std::map iterates sorted
    index.emplace(id, static_cast<uint32_t>(g.node_ids.size()));
    g.node_ids.push_back(id);
    g.roles.push_back(role);
  }

  // Edge coarsening: aggregate every ordered pair's count and amount sum.
  std::unordered_map<uint64_t, PairAccum> pairs;
  pairs.reserve(records.size() * 2);
  for (const auto& r : records) {
    const uint32_t s = index.at(r.from_account);
    const uint32_t d = index.at(r.to_account);
    PairAccum& acc = pairs[(static_cast<uint64_t>(s) << 32) | d];
    ++acc.t;
    if (!r.is_contract_call()) acc.w = acc.w.checked_add(r.value);
  }

  std::vector<uint64_t> keys;
  keys.reserve(pairs.size());
  for (const auto& [key, acc] : pairs) keys.push_back(key);
  std::sort(keys.begin(), keys.end());

  const uint32_t n = g.node_count();
  g.edges.reserve(keys.size());
  g.out_offsets.assign(n + 1, 0);
  for (const uint64_t key : keys) {
    const PairAccum& acc = pairs.at(key);
    CoarseEdge e;
    e.src = static_cast<uint32_t>(key >> 32);
    e.dst = static_cast<uint32_t>(key & 0xffffffffu);
    e.t = acc.t;
    e.w_tilde = acc.w;
    ++g.out_offsets[e.src + 1];
    g.edges.push_back(e);
  }
  for (uint32_t v = 0; v < n; ++v) g.out_offsets[v + 1] += g.out_offsets[v];

  // In-orientation: bucket edge positions by dst; iterating edges in (src,dst)
  // order keeps each bucket sorted by src.
  g.in_offsets.assign(n + 1, 0);
  for (const auto& e : g.edges) ++g.in_offsets[e.dst + 1];
  for (uint32_t v = 0; v < n; ++v) g.in_offsets[v + 1] += g.in_offsets[v];
  g.in_edges.assign(g.edges.size(), 0);
  std::vector<uint64_t> cursor(g.in_offsets.begin(), g.in_offsets.end() - 1);
  for (uint64_t i = 0; i < g.edges.size(); ++i) g.in_edges[cursor[g.edges[i].dst]++] = i;

  g.feat_offsets.assign(n + 1, 0);
  return g;
}

void build_contract_features(const std::vector<InteractionRecord>& records, LwAig& graph,
                             const FeatureOptions& opts) {
  graph.feat_opts = opts;

  // Tally calls per (caller, contract) and total calls per contract.
  std::unordered_map<std::string, uint64_t> contract_totals;
  std::unordered_map<uint64_t, uint64_t> cell;  // (caller idx, contract idx) -> count
  std::unordered_map<std::string, uint32_t> index;
  index.reserve(graph.node_count() * 2);
  for (uint32_t v = 0; v < graph.node_count(); ++v) index.emplace(graph.node_ids[v], v);
  for (const auto& r : records) {
    if (!r.is_contract_call()) continue;
    ++contract_totals[r.to_account];
    const uint64_t key = (static_cast<uint64_t>(index.at(r.from_account)) << 32) |
                         index.at(r.to_account);
    ++cell[key];
  }

  // Columns: called contracts in lexicographic id order (permutation-independent),
  // optionally filtered by total call count.
  graph.contract_ids.clear();
  for (const auto& [id, total] : contract_totals)
    if (total >= opts.min_contract_calls) graph.contract_ids.push_back(id);
  std::sort(graph.contract_ids.begin(), graph.contract_ids.end());
  std::unordered_map<std::string, uint32_t> column;
  column.reserve(graph.contract_ids.size() * 2);
  for (size_t c = 0; c < graph.contract_ids.size(); ++c)
    column.emplace(graph.contract_ids[c], static_cast<uint32_t>(c));

  // Sparse rows, CSR over nodes with ascending columns. CA rows stay empty:
  // the matrix describes call preferences of externally owned accounts only.
  std::vector<std::pair<uint64_t, uint32_t>> triplets;  // ((node, col), count)
  triplets.reserve(cell.size());
  for (const auto& [key, count] : cell) {
    const uint32_t caller = static_cast<uint32_t>(key >> 32);
    if (graph.roles[caller] == Role::CA) continue;
    const auto it = column.find(graph.node_ids[static_cast<uint32_t>(key & 0xffffffffu)]);
    if (it == column.end()) continue;  // filtered out
    if (count > UINT32_MAX) throw Error("per-cell call count overflows 32 bits");
    triplets.emplace_back((static_cast<uint64_t>(caller) << 32) | it->second,
                          static_cast<uint32_t>(count));
  }
  std::sort(triplets.begin(), triplets.end());

  const uint32_t n = graph.node_count();
  graph.feat_offsets.assign(n + 1, 0);
  graph.feat_cols.clear();
  graph.feat_counts.clear();
  graph.feat_cols.reserve(triplets.size());
  graph.feat_counts.reserve(triplets.size());
  for (const auto& [key, count] : triplets) {
    ++graph.feat_offsets[(key >> 32) + 1];
    graph.feat_cols.push_back(static_cast<uint32_t>(key & 0xffffffffu));
    graph.feat_counts.push_back(count);
  }
  for (uint32_t v = 0; v < n; ++v) graph.feat_offsets[v + 1] += graph.feat_offsets[v];
}

LwAig build_graph(const std::vector<InteractionRecord>& records, const FeatureOptions& opts) {
  LwAig g = build_lw_aig(records);
  build_contract_features(records, g, opts);
  return g;
}

std::vector<std::pair<uint32_t, const CoarseEdge*>> neighbors(const LwAig& graph, uint32_t v,
                                                              Direction dir) {
  if (v >= graph.node_count()) throw Error("neighbors: node index out of range");
  std::vector<std::pair<uint32_t, const CoarseEdge*>> out;
  if (dir == Direction::Out || dir == Direction::Both)
    for (uint64_t i = graph.out_offsets[v]; i < graph.out_offsets[v + 1]; ++i)
      out.emplace_back(graph.edges[i].dst, &graph.edges[i]);
  if (dir == Direction::In || dir == Direction::Both)
    for (uint64_t i = graph.in_offsets[v]; i < graph.in_offsets[v + 1]; ++i) {
      const CoarseEdge& e = graph.edges[graph.in_edges[i]];
      out.emplace_back(e.src, &e);
    }
  return out;
}

void save_graph(const LwAig& graph, const std::string& path) {
  BinaryWriter w(path);
  w.magic(kGraphMagic, kGraphVersion);
  w.u8(static_cast<uint8_t>(graph.feat_opts.scale));
  w.u8(graph.feat_opts.is_contract_column ? 1 : 0);
  w.u32(graph.feat_opts.min_contract_calls);

  const uint32_t n = graph.node_count();
  w.u32(n);
  for (uint32_t v = 0; v < n; ++v) {
    w.str(graph.node_ids[v]);
    w.u8(static_cast<uint8_t>(graph.roles[v]));
  }

  w.u64(graph.edges.size());
  for (const auto& e : graph.edges) {
    w.u32(e.src);
    w.u32(e.dst);
    w.u64(e.t);
    w.amount(e.w_tilde);
  }
  for (const uint64_t off : graph.out_offsets) w.u64(off);
  for (const uint64_t ref : graph.in_edges) w.u64(ref);
  for (const uint64_t off : graph.in_offsets) w.u64(off);

  w.u32(static_cast<uint32_t>(graph.contract_ids.size()));
  for (const auto& id : graph.contract_ids) w.str(id);
  w.u64(graph.feat_cols.size());
  for (const uint64_t off : graph.feat_offsets) w.u64(off);
  for (const uint32_t c : graph.feat_cols) w.u32(c);
  for (const uint32_t c : graph.feat_counts) w.u32(c);
  w.close();
}

LwAig load_graph(const std::string& path) {
  BinaryReader r(path);
  const uint32_t version = r.expect_magic(kGraphMagic);
  if (version != kGraphVersion) throw Error("unsupported graph version in '" + path + "'");

  LwAig g;
  g.feat_opts.scale = static_cast<FeatureScale>(r.u8());
  g.feat_opts.is_contract_column = r.u8() != 0;
  g.feat_opts.min_contract_calls = r.u32();

  const uint32_t n = r.u32();
  g.node_ids.resize(n);
  g.roles.resize(n);
  for (uint32_t v = 0; v < n; ++v) {
    g.node_ids[v] = r.str();
    g.roles[v] = static_cast<Role>(r.u8());
  }

  const uint64_t e = r.u64();
  g.edges.resize(e);
  for (uint64_t i = 0; i < e; ++i) {
    g.edges[i].src = r.u32();
    g.edges[i].dst = r.u32();
    g.edges[i].t = r.u64();
    g.edges[i].w_tilde = r.amount();
  }
  g.out_offsets.resize(n + 1);
  for (auto& off : g.out_offsets) off = r.u64();
  g.in_edges.resize(e);
  for (auto& ref : g.in_edges) ref = r.u64();
  g.in_offsets.resize(n + 1);
  for (auto& off : g.in_offsets) off = r.u64();

  const uint32_t contracts = r.u32();
  g.contract_ids.resize(contracts);
  for (auto& id : g.contract_ids) id = r.str();
  const uint64_t nnz = r.u64();
  g.feat_offsets.resize(n + 1);
  for (auto& off : g.feat_offsets) off = r.u64();
  g.feat_cols.resize(nnz);
  for (auto& c : g.feat_cols) c = r.u32();
  g.feat_counts.resize(nnz);
  for (auto& c : g.feat_counts) c = r.u32();
  if (!r.at_end()) throw Error("trailing bytes in '" + path + "'");
  return g;
}

}  // namespace graphid
