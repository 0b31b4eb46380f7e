#include "graphid/sampling.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "graphid/binio.hpp"
#include "graphid/common.hpp"

namespace graphid {

namespace {

constexpr char kDatasetMagic[4] = {'B', 'G', 'C', 'D'};
constexpr uint32_t kDatasetVersion = 1;

unsigned __int128 edge_attr(const CoarseEdge& e, RankAttr attr) {
  return attr == RankAttr::T ? static_cast<unsigned __int128>(e.t) : e.w_tilde.wei;
}

}  // namespace

RankAttr parse_rank_attr(const std::string& text) {
  if (text == "t") return RankAttr::T;
  if (text == "w_tilde" || text == "w") return RankAttr::WTilde;
  throw Error("unknown ranking attribute '" + text + "' (t|w_tilde)");
}

std::string to_string(RankAttr attr) {
  return attr == RankAttr::T ? "t" : "w_tilde";
}

std::vector<uint32_t> topk_neighbors(const LwAig& graph, uint32_t v, RankAttr attr, uint32_t k) {
  if (v >= graph.node_count()) throw Error("topk_neighbors: node index out of range");
  if (k == 0) throw Error("topk_neighbors: k must be >= 1");

  struct Cand {
    uint32_t node;
    unsigned __int128 attr;
  };
  std::vector<Cand> cands;

  // Both adjacency slices are sorted by neighbor, so merge them, summing the
  // attribute per neighbor. A self-loop shows up in both slices but is one
  // edge and counts once.
  uint64_t oi = graph.out_offsets[v], oe = graph.out_offsets[v + 1];
  uint64_t ii = graph.in_offsets[v], ie = graph.in_offsets[v + 1];
  while (oi < oe || ii < ie) {
    const uint32_t od = oi < oe ? graph.edges[oi].dst : UINT32_MAX;
    const uint32_t is = ii < ie ? graph.edges[graph.in_edges[ii]].src : UINT32_MAX;
    if (od < is) {
      cands.push_back({od, edge_attr(graph.edges[oi], attr)});
      ++oi;
    } else if (is < od) {
      cands.push_back({is, edge_attr(graph.edges[graph.in_edges[ii]], attr)});
      ++ii;
    } else {
      unsigned __int128 a = edge_attr(graph.edges[oi], attr);
      if (od != v) a += edge_attr(graph.edges[graph.in_edges[ii]], attr);
      cands.push_back({od, a});
      ++oi;
      ++ii;
    }
  }

  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.attr != b.attr) return a.attr > b.attr;
    return a.node < b.node;
  });
  if (cands.size() > k) cands.resize(k);
  std::vector<uint32_t> out;
  out.reserve(cands.size());
  for (const auto& c : cands) out.push_back(c.node);
  return out;
}

AccountSubgraph sample_subgraph(const LwAig& graph, uint32_t v, uint32_t h, uint32_t k,
                                RankAttr attr) {
  if (v >= graph.node_count()) throw Error("sample_subgraph: node index out of range");
  if (h == 0) throw Error("sample_subgraph: h must be >= 1");

  AccountSubgraph g;
  g.center = 0;
  g.node_map.push_back(v);
  std::unordered_set<uint32_t> visited{v};
  std::vector<uint32_t> frontier{v};
  for (uint32_t round = 0; round < h && !frontier.empty(); ++round) {
    std::vector<uint32_t> next;
    for (const uint32_t u : frontier)
      for (const uint32_t w : topk_neighbors(graph, u, attr, k))
        if (visited.insert(w).second) {
          g.node_map.push_back(w);
          next.push_back(w);
        }
    frontier = std::move(next);
  }

  std::unordered_map<uint32_t, uint32_t> local;
  local.reserve(g.node_map.size() * 2);
  for (uint32_t i = 0; i < g.node_map.size(); ++i) local.emplace(g.node_map[i], i);

  for (uint32_t i = 0; i < g.node_map.size(); ++i) {
    const uint32_t u = g.node_map[i];
    for (uint64_t e = graph.out_offsets[u]; e < graph.out_offsets[u + 1]; ++e) {
      const auto it = local.find(graph.edges[e].dst);
      if (it == local.end()) continue;
      CoarseEdge le = graph.edges[e];
      le.src = i;
      le.dst = it->second;
      g.edges.push_back(le);
    }
  }

  g.feat_width = graph.feature_width();
  g.feat_rows.reserve(g.node_map.size());
  for (const uint32_t u : g.node_map) g.feat_rows.push_back(graph.feature_row(u));
  return g;
}

LabeledDataset build_labeled_dataset(const LwAig& graph, const std::vector<uint32_t>& positives,
                                     const std::vector<uint32_t>& negative_pool,
                                     const std::string& positive_class, uint32_t h, uint32_t k,
                                     RankAttr attr, uint64_t seed) {
  if (negative_pool.size() < positives.size())
    throw Error("insufficient negative pool: need " + std::to_string(positives.size()) +
                ", available " + std::to_string(negative_pool.size()));

  // Canonical order before the seeded draw so the selection is independent of
  // caller-side ordering.
  std::vector<uint32_t> pool = negative_pool;
  std::sort(pool.begin(), pool.end());
  Rng rng(mix_seed(seed, 0x6e656773ull));  // negative-selection stream
  rng.shuffle(pool);
  pool.resize(positives.size());

  std::vector<std::pair<uint32_t, uint8_t>> targets;  // (node, label)
  targets.reserve(positives.size() * 2);
  for (const uint32_t v : positives) targets.emplace_back(v, 1);
  for (const uint32_t v : pool) targets.emplace_back(v, 0);
  // Node indexes follow lexicographic account order, so sorting by index
  // orders the dataset by account id.
  std::sort(targets.begin(), targets.end());

  LabeledDataset ds;
  ds.positive_class = positive_class;
  ds.attr = attr;
  ds.h = h;
  ds.k = k;
  ds.seed = seed;
  ds.feat_width = graph.feature_width();
  ds.subgraphs.reserve(targets.size());
  ds.accounts.reserve(targets.size());
  for (const auto& [v, label] : targets) {
    AccountSubgraph g = sample_subgraph(graph, v, h, k, attr);
    g.label = label;
    ds.subgraphs.push_back(std::move(g));
    ds.accounts.push_back(graph.node_ids[v]);
  }
  return ds;
}

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  BinaryWriter w(path);
  w.magic(kDatasetMagic, kDatasetVersion);
  w.str(ds.positive_class);
  w.u8(static_cast<uint8_t>(ds.attr));
  w.u32(ds.h);
  w.u32(ds.k);
  w.u64(ds.seed);
  w.u32(ds.feat_width);
  w.u32(static_cast<uint32_t>(ds.subgraphs.size()));
  for (uint32_t i = 0; i < ds.subgraphs.size(); ++i) {
    const AccountSubgraph& g = ds.subgraphs[i];
    w.str(ds.accounts[i]);
    w.u8(g.label.value_or(255));
    w.u32(g.center);
    w.u32(g.size());
    for (const uint32_t v : g.node_map) w.u32(v);
    w.u64(g.edges.size());
    for (const auto& e : g.edges) {
      w.u32(e.src);
      w.u32(e.dst);
      w.u64(e.t);
      w.amount(e.w_tilde);
    }
    for (const auto& row : g.feat_rows) {
      w.u32(static_cast<uint32_t>(row.size()));
      for (const auto& [col, val] : row) {
        w.u32(col);
        w.f64(val);
      }
    }
  }
  w.close();

  std::ofstream manifest(path + ".manifest");
  if (!manifest) throw Error("cannot open '" + path + ".manifest' for writing");
  manifest << "account,label,nodes,edges\n";
  for (uint32_t i = 0; i < ds.subgraphs.size(); ++i) {
    const AccountSubgraph& g = ds.subgraphs[i];
    manifest << ds.accounts[i] << ',' << static_cast<int>(g.label.value_or(255)) << ','
             << g.size() << ',' << g.edges.size() << '\n';
  }
  if (!manifest.good()) throw Error("write failure on '" + path + ".manifest'");
}

LabeledDataset load_dataset(const std::string& path) {
  BinaryReader r(path);
  const uint32_t version = r.expect_magic(kDatasetMagic);
  if (version != kDatasetVersion) throw Error("unsupported dataset version in '" + path + "'");

  LabeledDataset ds;
  ds.positive_class = r.str();
  ds.attr = static_cast<RankAttr>(r.u8());
  ds.h = r.u32();
  ds.k = r.u32();
  ds.seed = r.u64();
  ds.feat_width = r.u32();
  const uint32_t count = r.u32();
  ds.subgraphs.resize(count);
  ds.accounts.resize(count);
  for (uint32_t i = 0; i < count; ++i) {
    AccountSubgraph& g = ds.subgraphs[i];
    ds.accounts[i] = r.str();
    const uint8_t label = r.u8();
    if (label != 255) g.label = label;
    g.center = r.u32();
    const uint32_t nv = r.u32();
    g.node_map.resize(nv);
    for (auto& v : g.node_map) v = r.u32();
    const uint64_t ne = r.u64();
    g.edges.resize(ne);
    for (auto& e : g.edges) {
      e.src = r.u32();
      e.dst = r.u32();
      e.t = r.u64();
      e.w_tilde = r.amount();
    }
    g.feat_width = ds.feat_width;
    g.feat_rows.resize(nv);
    for (auto& row : g.feat_rows) {
      row.resize(r.u32());
      for (auto& [col, val] : row) {
        col = r.u32();
        val = r.f64();
      }
    }
  }
  if (!r.at_end()) throw Error("trailing bytes in '" + path + "'");
  return ds;
}

}  // namespace graphid
