#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "graphid/graph.hpp"
#include "graphid/sampling.hpp"
#include "support.hpp"

using namespace graphid;
using testsupport::LedgerSpec;

namespace {

/// Graph from an explicit edge list (src, dst, t); w_tilde = t ether.
LwAig toy_graph(uint32_t n, const std::vector<std::array<uint32_t, 3>>& edges) {
  std::vector<InteractionRecord> records;
  for (const auto& [s, d, t] : edges)
    for (uint32_t i = 0; i < t; ++i) {
      InteractionRecord r;
      r.from_account = std::string("n") + char('0' + s);
      r.to_account = std::string("n") + char('0' + d);
      r.value = Amount::from_milli_ether(1000);
      records.push_back(r);
    }
  LwAig g = build_graph(records);
  REQUIRE(g.node_count() == n);
  return g;
}

}  // namespace

TEST_CASE("topk ranking sums both orientations and breaks ties by index") {
  // node 0: self-loop t=5 (counts once); node 1: 3 out + 2 in = 5 (tie with
  // the self-loop, lower index wins); node 2: t=4
  LwAig g = toy_graph(3, {{0, 0, 5}, {0, 1, 3}, {1, 0, 2}, {2, 0, 4}});
  const uint32_t v0 = *g.find_node("n0");
  auto top = topk_neighbors(g, v0, RankAttr::T, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0] == *g.find_node("n0"));  // score 5, index 0
  CHECK(top[1] == *g.find_node("n1"));  // score 5, index 1
  auto top3 = topk_neighbors(g, v0, RankAttr::T, 3);
  CHECK(top3.back() == *g.find_node("n2"));  // score 4

  CHECK(topk_neighbors(g, v0, RankAttr::T, 0).empty());
  CHECK_THROWS_AS(topk_neighbors(g, g.node_count(), RankAttr::T, 2), Error);
}

TEST_CASE("w_tilde ranking is exact beyond double precision") {
  // Two candidate neighbors whose w_tilde differ by 1 wei at 2^90 scale; a
  // double cannot represent the difference but the ranking must see it.
  const unsigned __int128 big = (unsigned __int128)1 << 90;
  std::vector<InteractionRecord> records;
  InteractionRecord r;
  r.from_account = "center";
  r.to_account = "alpha";
  r.value = Amount{big};
  records.push_back(r);
  r.to_account = "beta";
  r.value = Amount{big + 1};
  records.push_back(r);
  LwAig g = build_graph(records);

  auto top = topk_neighbors(g, *g.find_node("center"), RankAttr::WTilde, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0] == *g.find_node("beta"));
}

TEST_CASE("subgraph sampling matches the reference expansion on random graphs") {
  graphid::Rng rng(31337);
  LedgerSpec spec;
  spec.max_records = 600;
  for (int i = 0; i < 60; ++i) {
    auto records = testsupport::random_ledger(rng, spec);
    LwAig g = build_graph(records);
    if (g.node_count() == 0) continue;
    for (int c = 0; c < 8; ++c) {
      const uint32_t center = static_cast<uint32_t>(rng.below(g.node_count()));
      const uint32_t h = static_cast<uint32_t>(rng.below(3));
      const uint32_t k = static_cast<uint32_t>(rng.between(1, 5));
      const RankAttr attr = rng.bernoulli(0.5) ? RankAttr::T : RankAttr::WTilde;
      AccountSubgraph s = sample_subgraph(g, center, h, k, attr);
      auto want = testsupport::oracle_sample(g, center, h, k, attr);
      const std::string err = testsupport::compare_subgraph(g, s, want, center);
      CHECK_MESSAGE(err.empty(), "graph ", i, " center ", center, " h ", h, " k ", k, ": ", err);
    }
  }
}

TEST_CASE("h=0 yields the bare center") {
  LwAig g = toy_graph(3, {{0, 1, 1}, {1, 2, 1}});
  AccountSubgraph s = sample_subgraph(g, 1, 0, 5, RankAttr::T);
  CHECK(s.node_map == std::vector<uint32_t>{1});
  CHECK(s.edges.empty());
  REQUIRE(s.feat_rows.size() == 1);
}

TEST_CASE("size bound holds") {
  graphid::Rng rng(8);
  LedgerSpec spec;
  spec.max_records = 1500;
  auto records = testsupport::random_ledger(rng, spec);
  LwAig g = build_graph(records);
  for (uint32_t v = 0; v < g.node_count(); ++v) {
    AccountSubgraph s = sample_subgraph(g, v, 2, 3, RankAttr::T);
    CHECK(s.size() <= 1 + 3 + 9);
    CHECK(s.center == v);
    CHECK(s.node_map[0] == v);
  }
}

TEST_CASE("balanced dataset construction") {
  graphid::Rng rng(417);
  LedgerSpec spec;
  spec.max_accounts = 40;
  spec.max_records = 1200;
  spec.min_records = 600;
  auto records = testsupport::random_ledger(rng, spec);
  LwAig g = build_graph(records);

  std::vector<uint32_t> eoas;
  for (uint32_t v = 0; v < g.node_count(); ++v)
    if (g.roles[v] == Role::EOA) eoas.push_back(v);
  REQUIRE(eoas.size() >= 8);

  std::vector<uint32_t> positives(eoas.begin(), eoas.begin() + 4);
  std::vector<uint32_t> pool(eoas.begin() + 4, eoas.end());

  LabeledDataset ds = build_labeled_dataset(g, positives, pool, "Exchange", 2, 4, RankAttr::T, 7);
  CHECK(ds.positive_class == "Exchange");
  CHECK(ds.h == 2);
  CHECK(ds.k == 4);
  CHECK(ds.seed == 7);
  CHECK(ds.feat_width == g.feature_width());
  REQUIRE(ds.subgraphs.size() == 8);
  REQUIRE(ds.accounts.size() == 8);

  size_t pos_count = 0;
  std::set<std::string> seen;
  for (size_t i = 0; i < ds.subgraphs.size(); ++i) {
    REQUIRE(ds.subgraphs[i].label.has_value());
    pos_count += *ds.subgraphs[i].label;
    CHECK(seen.insert(ds.accounts[i]).second);  // no duplicate centers
    CHECK(g.node_ids[ds.subgraphs[i].node_map[0]] == ds.accounts[i]);
    if (i > 0) CHECK(ds.accounts[i - 1] < ds.accounts[i]);  // ordered by account id
  }
  CHECK(pos_count == 4);

  // negatives came from the pool
  for (size_t i = 0; i < ds.subgraphs.size(); ++i)
    if (*ds.subgraphs[i].label == 0) {
      const uint32_t v = ds.subgraphs[i].node_map[0];
      CHECK(std::find(pool.begin(), pool.end(), v) != pool.end());
    }

  // same seed reproduces, different seed may pick other negatives
  LabeledDataset again =
      build_labeled_dataset(g, positives, pool, "Exchange", 2, 4, RankAttr::T, 7);
  CHECK(again.accounts == ds.accounts);
  CHECK(again.subgraphs == ds.subgraphs);

  CHECK_THROWS_AS(
      build_labeled_dataset(g, eoas, {}, "Exchange", 2, 4, RankAttr::T, 7), Error);
}

TEST_CASE("dataset pack round-trips with a manifest") {
  graphid::Rng rng(4242);
  LedgerSpec spec;
  spec.max_records = 900;
  spec.min_records = 500;
  auto records = testsupport::random_ledger(rng, spec);
  LwAig g = build_graph(records);

  std::vector<uint32_t> eoas;
  for (uint32_t v = 0; v < g.node_count(); ++v)
    if (g.roles[v] == Role::EOA) eoas.push_back(v);
  REQUIRE(eoas.size() >= 6);
  std::vector<uint32_t> positives(eoas.begin(), eoas.begin() + 3);
  std::vector<uint32_t> pool(eoas.begin() + 3, eoas.end());
  LabeledDataset ds = build_labeled_dataset(g, positives, pool, "Mining", 1, 3, RankAttr::T, 1);

  const std::string path = "/tmp/graphid_test_ds.bin";
  save_dataset(ds, path);
  LabeledDataset back = load_dataset(path);
  CHECK(back.positive_class == ds.positive_class);
  CHECK(back.attr == ds.attr);
  CHECK(back.h == ds.h);
  CHECK(back.k == ds.k);
  CHECK(back.seed == ds.seed);
  CHECK(back.feat_width == ds.feat_width);
  CHECK(back.subgraphs == ds.subgraphs);
  CHECK(back.accounts == ds.accounts);

  std::ifstream mf(path + ".manifest");
  REQUIRE(mf.good());
  std::string line;
  size_t lines = 0;
  while (std::getline(mf, line)) {
    if (lines == 0) CHECK(line == "account,label,nodes,edges");
    ++lines;
  }
  CHECK(lines == ds.subgraphs.size() + 1);

  std::remove(path.c_str());
  std::remove((path + ".manifest").c_str());
}
