#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "graphid/graph.hpp"
#include "graphid/labels.hpp"
#include "graphid/record.hpp"
#include "graphid/synth.hpp"
#include "support.hpp"

using namespace graphid;

namespace {

struct SynthFiles {
  std::string ledger, labels, manifest;
  SynthResult result;

  explicit SynthFiles(const std::string& tag) {
    ledger = "/tmp/graphid_synth_" + tag + ".csv";
    labels = "/tmp/graphid_synth_" + tag + "_labels.csv";
    manifest = "/tmp/graphid_synth_" + tag + "_manifest.txt";
  }
  ~SynthFiles() {
    std::remove(ledger.c_str());
    std::remove(labels.c_str());
    std::remove(manifest.c_str());
  }
  void generate(const SynthProfile& p, uint64_t seed, uint32_t scale) {
    result = generate_ledger(p, seed, scale, ledger, labels, manifest);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t count_lines(const std::string& body) {
  size_t n = 0;
  for (char c : body)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("generator output is byte-stable in (profile, seed, scale)") {
  SynthFiles a("det_a"), b("det_b"), c("det_c");
  a.generate(SynthProfile::planted(), 11, 1);
  b.generate(SynthProfile::planted(), 11, 1);
  c.generate(SynthProfile::planted(), 12, 1);
  CHECK(slurp(a.ledger) == slurp(b.ledger));
  CHECK(slurp(a.labels) == slurp(b.labels));
  CHECK(slurp(a.manifest) == slurp(b.manifest));
  CHECK(slurp(a.ledger) != slurp(c.ledger));
  CHECK(a.result.records == b.result.records);
}

TEST_CASE("result counts match the files") {
  SynthFiles f("counts");
  f.generate(SynthProfile::planted(), 42, 1);

  const std::string ledger = slurp(f.ledger);
  CHECK(count_lines(ledger) == f.result.records + 1);  // header

  const std::string labels = slurp(f.labels);
  CHECK(count_lines(labels) == f.result.labeled + 1);
  CHECK(f.result.labeled == 400);  // 200 per planted class

  const std::string manifest = slurp(f.manifest);
  CHECK(manifest.find("profile=planted") != std::string::npos);
  CHECK(manifest.find("seed=42") != std::string::npos);
  CHECK(manifest.find("scale=1") != std::string::npos);
  CHECK(manifest.find("records=" + std::to_string(f.result.records)) != std::string::npos);
}

TEST_CASE("ledger parses cleanly and labels map to real EOA nodes") {
  SynthFiles f("parse");
  f.generate(SynthProfile::planted(), 7, 1);

  ParseResult rep = parse_records_file(f.ledger);
  CHECK(rep.errors.empty());
  CHECK(rep.rejected == 0);
  CHECK(rep.records.size() == f.result.records);

  LwAig g = build_graph(rep.records);
  size_t ca_nodes = 0;
  for (Role r : g.roles) ca_nodes += r == Role::CA;
  CHECK(ca_nodes <= 16);  // planted profile's contract pool
  // every node is either a generated account or a generated contract; a few
  // filler accounts may never be drawn into a record
  CHECK(g.node_ids.size() - ca_nodes <= f.result.accounts);
  CHECK(g.node_ids.size() - ca_nodes >= f.result.labeled);

  auto labels = load_labels(f.labels);
  CHECK(labels.size() == f.result.labeled);
  std::set<std::string> classes;
  for (const auto& [acct, label] : labels) {
    classes.insert(label);
    auto idx = g.find_node(acct);
    REQUIRE_MESSAGE(idx.has_value(), "labeled account missing from graph: ", acct);
    CHECK(g.roles[*idx] == Role::EOA);
  }
  CHECK(classes == std::set<std::string>{"Exchange", "Phish-hack"});

  // every feature column refers to a contract node
  for (const std::string& cid : g.contract_ids) {
    auto idx = g.find_node(cid);
    REQUIRE(idx.has_value());
    CHECK(g.roles[*idx] == Role::CA);
  }
}

TEST_CASE("scale multiplies only the background records") {
  SynthFiles s1("scale1"), s2("scale2");
  s1.generate(SynthProfile::planted(), 5, 1);
  s2.generate(SynthProfile::planted(), 5, 2);
  CHECK(s2.result.labeled == s1.result.labeled);
  CHECK(s2.result.records > s1.result.records);
  CHECK(s2.result.accounts > s1.result.accounts);
  const uint64_t d12 = s2.result.records - s1.result.records;
  SynthFiles s3("scale3");
  s3.generate(SynthProfile::planted(), 5, 3);
  const uint64_t d23 = s3.result.records - s2.result.records;
  // per-unit filler volume is random but concentrates tightly around its mean
  CHECK(d12 > 0);
  CHECK(d23 > double(d12) * 0.9);
  CHECK(d23 < double(d12) * 1.1);
  CHECK(s2.result.accounts - s1.result.accounts == 4000);  // filler accounts scale exactly
}

TEST_CASE("null profile draws both classes from one distribution") {
  SynthFiles f("null");
  f.generate(SynthProfile::null_profile(), 3, 1);
  auto labels = load_labels(f.labels);
  size_t pos = 0, neg = 0;
  for (const auto& [acct, label] : labels) {
    (void)acct;
    if (label == "Exchange") ++pos;
    else ++neg;
  }
  CHECK(pos == neg);
  CHECK(pos > 0);
}

TEST_CASE("profiles resolve by name") {
  CHECK(SynthProfile::by_name("planted").name == "planted");
  CHECK(SynthProfile::by_name("null").name == "null");
  CHECK_THROWS_AS(SynthProfile::by_name("bogus"), Error);
  CHECK_THROWS_AS(generate_ledger(SynthProfile::planted(), 1, 0, "/tmp/x", "/tmp/y", "/tmp/z"),
                  Error);
}
