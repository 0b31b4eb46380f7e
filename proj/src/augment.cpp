#include "graphid/augment.hpp"

#include <cstdio>
#include <cstdlib>

namespace graphid {

AugmentSpec parse_augment_spec(const std::string& text) {
  if (text == "identity" || text == "id") return {AugmentOp::Identity, 0.0};
  const size_t colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string op = text.substr(0, colon);
    const std::string prob = text.substr(colon + 1);
    char* end = nullptr;
    const double p = std::strtod(prob.c_str(), &end);
    if (end == prob.c_str() || *end != '\0' || p < 0.0 || p > 1.0)
      throw Error("augmentation probability out of [0,1]: '" + text + "'");
    if (op == "fm") return {AugmentOp::FeatureMask, p};
    if (op == "nd") return {AugmentOp::NodeDrop, p};
  }
  throw Error("unknown augmentation spec '" + text + "' (identity|fm:P|nd:P)");
}

std::string to_string(const AugmentSpec& spec) {
  if (spec.op == AugmentOp::Identity) return "identity";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s:%g", spec.op == AugmentOp::FeatureMask ? "fm" : "nd",
                spec.p);
  return buf;
}

AccountSubgraph feature_mask(const AccountSubgraph& g, double p, Rng& rng, bool per_node) {
  AccountSubgraph view = g;
  if (!per_node) {
    std::vector<uint8_t> masked(g.feat_width);
    for (uint32_t d = 0; d < g.feat_width; ++d) masked[d] = rng.bernoulli(p) ? 1 : 0;
    for (auto& row : view.feat_rows) {
      size_t kept = 0;
      for (const auto& cell : row)
        if (!masked[cell.first]) row[kept++] = cell;
      row.resize(kept);
    }
  } else {
    for (auto& row : view.feat_rows) {
      std::vector<uint8_t> masked(g.feat_width);
      for (uint32_t d = 0; d < g.feat_width; ++d) masked[d] = rng.bernoulli(p) ? 1 : 0;
      size_t kept = 0;
      for (const auto& cell : row)
        if (!masked[cell.first]) row[kept++] = cell;
      row.resize(kept);
    }
  }
  return view;
}

AccountSubgraph node_drop(const AccountSubgraph& g, double p, Rng& rng) {
  const uint32_t n = g.size();
  std::vector<uint32_t> remap(n, UINT32_MAX);
  AccountSubgraph view;
  view.feat_width = g.feat_width;
  view.label = g.label;
  for (uint32_t i = 0; i < n; ++i) {
    const bool keep = i == g.center || !rng.bernoulli(p);
    if (!keep) continue;
    remap[i] = view.size();
    view.node_map.push_back(g.node_map[i]);
    view.feat_rows.push_back(g.feat_rows[i]);
  }
  view.center = remap[g.center];
  for (const auto& e : g.edges) {
    if (remap[e.src] == UINT32_MAX || remap[e.dst] == UINT32_MAX) continue;
    CoarseEdge le = e;
    le.src = remap[e.src];
    le.dst = remap[e.dst];
    view.edges.push_back(le);
  }
  return view;
}

AccountSubgraph apply_augment(const AccountSubgraph& g, const AugmentSpec& spec, Rng& rng,
                              bool per_node_mask) {
  switch (spec.op) {
    case AugmentOp::Identity: return g;
    case AugmentOp::FeatureMask: return feature_mask(g, spec.p, rng, per_node_mask);
    case AugmentOp::NodeDrop: return node_drop(g, spec.p, rng);
  }
  throw Error("invalid augmentation op");
}

std::pair<std::vector<AccountSubgraph>, std::vector<AccountSubgraph>> make_view_datasets(
    const std::vector<AccountSubgraph>& D, const AugmentSpec& spec1, const AugmentSpec& spec2,
    uint64_t seed, bool per_node_mask) {
  if (D.empty()) throw Error("make_view_datasets: empty dataset");
  std::pair<std::vector<AccountSubgraph>, std::vector<AccountSubgraph>> out;
  out.first.reserve(D.size());
  out.second.reserve(D.size());
  for (size_t i = 0; i < D.size(); ++i) {
    Rng r1 = view_rng(seed, i, 1);
    Rng r2 = view_rng(seed, i, 2);
    out.first.push_back(apply_augment(D[i], spec1, r1, per_node_mask));
    out.second.push_back(apply_augment(D[i], spec2, r2, per_node_mask));
  }
  return out;
}

}  // namespace graphid
