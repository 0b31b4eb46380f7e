#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "graphid/augment.hpp"
#include "graphid/model.hpp"
#include "graphid/tape.hpp"

namespace testsupport {

using graphid::AccountSubgraph;
using graphid::Amount;
using graphid::CoarseEdge;
using graphid::InteractionRecord;
using graphid::LwAig;
using graphid::Rng;
using graphid::Role;
using graphid::Tensor;

typedef unsigned __int128 u128;

namespace {

std::string account_name(uint32_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "a%03u", i);
  return buf;
}

std::string u128_str(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------- ledgers

std::vector<InteractionRecord> random_ledger(Rng& rng, const LedgerSpec& spec) {
  const uint32_t n_acc = static_cast<uint32_t>(rng.between(2, spec.max_accounts));
  const uint32_t n_rec =
      static_cast<uint32_t>(rng.between(spec.min_records, spec.max_records));

  // Sticky base role per account; individual records may contradict it when
  // conflicts are enabled, which the coarsener must resolve contract-wins.
  std::vector<char> base_ca(n_acc);
  for (auto& b : base_ca) b = rng.bernoulli(0.3) ? 1 : 0;

  static const char* kFunctions[] = {"transfer(address,uint256)", "approve(address;uint256)",
                                     "mint()", "swapExactTokens"};

  std::vector<InteractionRecord> out;
  out.reserve(n_rec);
  for (uint32_t i = 0; i < n_rec; ++i) {
    InteractionRecord r;
    const uint32_t from = static_cast<uint32_t>(rng.below(n_acc));
    uint32_t to = rng.bernoulli(spec.self_fraction) ? from
                                                    : static_cast<uint32_t>(rng.below(n_acc));
    r.from_account = account_name(from);
    r.to_account = account_name(to);
    r.block_number = rng.below(1000000);
    r.timestamp = static_cast<int64_t>(rng.below(30ull * 86400));

    auto flag = [&](uint32_t a) {
      bool f = base_ca[a] != 0;
      if (spec.allow_role_conflicts && rng.bernoulli(0.05)) f = !f;
      return f;
    };
    r.from_is_contract = flag(from);
    r.to_is_contract = flag(to);

    if (rng.bernoulli(spec.call_fraction)) {
      r.to_is_contract = true;  // a call's recipient is a contract by definition
      r.calling_function = kFunctions[rng.below(4)];
    }

    u128 wei = rng.below(10000000000000000000ull);  // < 10 ether
    if (rng.bernoulli(0.05)) wei *= 1000000000ull;  // force sums past 64 bits
    r.value = Amount{wei};
    out.push_back(std::move(r));
  }
  return out;
}

// ------------------------------------------------- coarsening reference

OracleGraph oracle_coarsen(const std::vector<InteractionRecord>& records) {
  OracleGraph g;
  for (const auto& r : records) {
    g.roles[r.from_account] = g.roles[r.from_account] || r.from_is_contract;
    g.roles[r.to_account] = g.roles[r.to_account] || r.to_is_contract;
  }
  for (const auto& r : records) {
    auto& e = g.edges[{r.from_account, r.to_account}];
    e.first += 1;
    if (!r.is_contract_call()) e.second += r.value.wei;
    if (r.is_contract_call()) {
      g.call_totals[r.to_account] += 1;
      if (!g.roles[r.from_account]) g.calls[r.from_account][r.to_account] += 1;
    }
  }
  return g;
}

std::string compare_graph(const LwAig& got, const OracleGraph& want) {
  std::ostringstream oss;

  std::vector<std::string> ids;
  ids.reserve(want.roles.size());
  for (const auto& [id, ca] : want.roles) ids.push_back(id);
  if (got.node_ids != ids) {
    oss << "node ids differ: got " << got.node_ids.size() << ", want " << ids.size();
    return oss.str();
  }
  for (size_t i = 0; i < ids.size(); ++i) {
    const Role want_role = want.roles.at(ids[i]) ? Role::CA : Role::EOA;
    if (got.roles[i] != want_role) {
      oss << "role mismatch at " << ids[i];
      return oss.str();
    }
  }

  if (got.edge_count() != want.edges.size()) {
    oss << "edge count " << got.edge_count() << " != " << want.edges.size();
    return oss.str();
  }
  if (got.out_offsets.size() != ids.size() + 1 || got.out_offsets.front() != 0 ||
      got.out_offsets.back() != got.edges.size()) {
    return "malformed out_offsets";
  }
  for (uint32_t v = 0; v < got.node_count(); ++v) {
    for (uint64_t p = got.out_offsets[v]; p < got.out_offsets[v + 1]; ++p) {
      const CoarseEdge& e = got.edges[p];
      if (e.src != v) return "edge filed under wrong src block";
      if (p > got.out_offsets[v] && got.edges[p - 1].dst >= e.dst)
        return "out-edges not strictly ascending by dst";
      auto it = want.edges.find({got.node_ids[e.src], got.node_ids[e.dst]});
      if (it == want.edges.end()) {
        oss << "unexpected edge " << got.node_ids[e.src] << "->" << got.node_ids[e.dst];
        return oss.str();
      }
      if (e.t != it->second.first) {
        oss << "t mismatch on " << got.node_ids[e.src] << "->" << got.node_ids[e.dst] << ": got "
            << e.t << ", want " << it->second.first;
        return oss.str();
      }
      if (e.w_tilde.wei != it->second.second) {
        oss << "w_tilde mismatch on " << got.node_ids[e.src] << "->" << got.node_ids[e.dst]
            << ": got " << u128_str(e.w_tilde.wei) << ", want " << u128_str(it->second.second);
        return oss.str();
      }
    }
  }

  // In-orientation index: a permutation of all edge positions, grouped by dst
  // with src ascending inside each group.
  if (got.in_offsets.size() != ids.size() + 1 || got.in_edges.size() != got.edges.size())
    return "malformed in index";
  std::vector<char> seen(got.edges.size(), 0);
  for (uint32_t v = 0; v < got.node_count(); ++v) {
    for (uint64_t p = got.in_offsets[v]; p < got.in_offsets[v + 1]; ++p) {
      const uint64_t pos = got.in_edges[p];
      if (pos >= got.edges.size() || seen[pos]) return "in index not a permutation";
      seen[pos] = 1;
      if (got.edges[pos].dst != v) return "in-edge filed under wrong dst block";
      if (p > got.in_offsets[v] && got.edges[got.in_edges[p - 1]].src >= got.edges[pos].src)
        return "in-edges not strictly ascending by src";
    }
  }
  return "";
}

std::string compare_features(const LwAig& got, const OracleGraph& want,
                             const graphid::FeatureOptions& opts) {
  std::ostringstream oss;

  std::vector<std::string> cols;
  for (const auto& [id, total] : want.call_totals)
    if (total >= opts.min_contract_calls) cols.push_back(id);  // map keys are already sorted
  if (got.contract_ids != cols) {
    oss << "contract columns differ: got " << got.contract_ids.size() << ", want " << cols.size();
    return oss.str();
  }
  const uint32_t want_width =
      static_cast<uint32_t>(cols.size()) + (opts.is_contract_column ? 1 : 0);
  if (got.feature_width() != want_width) {
    oss << "feature width " << got.feature_width() << " != " << want_width;
    return oss.str();
  }

  std::map<std::string, uint32_t> col_of;
  for (uint32_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = j;

  for (uint32_t v = 0; v < got.node_count(); ++v) {
    const std::string& id = got.node_ids[v];
    std::vector<std::pair<uint32_t, double>> expect;
    if (!want.roles.at(id)) {
      auto it = want.calls.find(id);
      if (it != want.calls.end()) {
        for (const auto& [contract, cnt] : it->second) {
          auto cit = col_of.find(contract);
          if (cit == col_of.end()) continue;  // column filtered out
          double val = 0.0;
          switch (opts.scale) {
            case graphid::FeatureScale::Count: val = static_cast<double>(cnt); break;
            case graphid::FeatureScale::Binary: val = 1.0; break;
            case graphid::FeatureScale::Log1p: val = std::log1p(static_cast<double>(cnt)); break;
          }
          expect.emplace_back(cit->second, val);
        }
        std::sort(expect.begin(), expect.end());
      }
    } else if (opts.is_contract_column) {
      expect.emplace_back(static_cast<uint32_t>(cols.size()), 1.0);
    }
    if (got.feature_row(v) != expect) {
      oss << "feature row mismatch at node " << id;
      return oss.str();
    }
  }
  return "";
}

// -------------------------------------------------- sampling reference

namespace {

std::vector<uint32_t> oracle_topk(const LwAig& g, uint32_t u, uint32_t k,
                                  graphid::RankAttr attr) {
  std::map<uint32_t, u128> score;
  for (const CoarseEdge& e : g.edges) {
    const u128 a = attr == graphid::RankAttr::T ? static_cast<u128>(e.t) : e.w_tilde.wei;
    if (e.src == u) score[e.dst] += a;
    if (e.dst == u && e.src != u) score[e.src] += a;  // self-loop counted once above
  }
  std::vector<std::pair<u128, uint32_t>> ranked;
  ranked.reserve(score.size());
  for (const auto& [v, s] : score) ranked.emplace_back(s, v);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<uint32_t> out;
  out.reserve(ranked.size());
  for (const auto& [s, v] : ranked) out.push_back(v);
  return out;
}

}  // namespace

SubgraphExpect oracle_sample(const LwAig& g, uint32_t center, uint32_t h, uint32_t k,
                             graphid::RankAttr attr) {
  std::set<uint32_t> visited{center};
  std::vector<uint32_t> frontier{center};
  for (uint32_t round = 0; round < h; ++round) {
    std::vector<uint32_t> next;
    for (const uint32_t u : frontier)
      for (const uint32_t v : oracle_topk(g, u, k, attr))
        if (visited.insert(v).second) next.push_back(v);
    frontier = std::move(next);
  }

  SubgraphExpect out;
  out.nodes.assign(visited.begin(), visited.end());
  for (const CoarseEdge& e : g.edges)
    if (visited.count(e.src) && visited.count(e.dst))
      out.edges[{e.src, e.dst}] = {e.t, e.w_tilde.wei};
  return out;
}

std::string compare_subgraph(const LwAig& g, const AccountSubgraph& got,
                             const SubgraphExpect& want, uint32_t center) {
  std::ostringstream oss;
  if (got.node_map.empty() || got.node_map[0] != center) return "center is not local node 0";
  if (got.center != center) return "center field mismatch";

  std::vector<uint32_t> sorted(got.node_map);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    return "duplicate node in node_map";
  if (sorted != want.nodes) {
    oss << "node set differs: got " << sorted.size() << ", want " << want.nodes.size();
    return oss.str();
  }

  std::map<std::pair<uint32_t, uint32_t>, std::pair<uint64_t, u128>> got_edges;
  for (const CoarseEdge& e : got.edges) {
    if (e.src >= got.node_map.size() || e.dst >= got.node_map.size())
      return "local edge index out of range";
    auto key = std::make_pair(got.node_map[e.src], got.node_map[e.dst]);
    if (got_edges.count(key)) return "duplicate edge for ordered pair";
    got_edges[key] = {e.t, e.w_tilde.wei};
  }
  if (got_edges != want.edges) {
    oss << "induced edges differ: got " << got_edges.size() << ", want " << want.edges.size();
    return oss.str();
  }

  if (got.feat_width != g.feature_width()) return "feat_width mismatch";
  if (got.feat_rows.size() != got.node_map.size()) return "feat_rows size mismatch";
  for (size_t i = 0; i < got.node_map.size(); ++i)
    if (got.feat_rows[i] != g.feature_row(got.node_map[i])) {
      oss << "feature row mismatch at local node " << i;
      return oss.str();
    }
  return "";
}

// ------------------------------------------------------ loss references

namespace {

std::vector<std::vector<double>> unit_rows(const Tensor& z) {
  std::vector<std::vector<double>> out(z.rows, std::vector<double>(z.cols));
  for (uint32_t i = 0; i < z.rows; ++i) {
    double sq = 0.0;
    for (uint32_t j = 0; j < z.cols; ++j) sq += z.at(i, j) * z.at(i, j);
    const double norm = std::max(std::sqrt(sq), 1e-12);
    for (uint32_t j = 0; j < z.cols; ++j) out[i][j] = z.at(i, j) / norm;
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double naive_contrastive(const Tensor& z1, const Tensor& z2, double tau) {
  const auto u = unit_rows(z1);
  const auto v = unit_rows(z2);
  const uint32_t n = z1.rows;
  double total = 0.0;
  for (uint32_t i = 0; i < n; ++i) {
    double denom = 0.0;
    for (uint32_t j = 0; j < n; ++j)
      if (j != i) denom += std::exp(dot(u[i], v[j]) / tau);
    total += -dot(u[i], v[i]) / tau + std::log(denom);
  }
  return total / n;
}

double naive_contrastive_standard(const Tensor& z1, const Tensor& z2, double tau) {
  auto u = unit_rows(z1);
  const auto v = unit_rows(z2);
  u.insert(u.end(), v.begin(), v.end());
  const size_t m = u.size();
  const size_t n = m / 2;
  double total = 0.0;
  for (size_t a = 0; a < m; ++a) {
    const size_t pos = (a + n) % m;
    double denom = 0.0;
    for (size_t b = 0; b < m; ++b)
      if (b != a) denom += std::exp(dot(u[a], u[b]) / tau);
    total += -dot(u[a], u[pos]) / tau + std::log(denom);
  }
  return total / static_cast<double>(m);
}

double naive_cross_entropy(const Tensor& logits, const std::vector<uint8_t>& labels) {
  double total = 0.0;
  for (uint32_t i = 0; i < logits.rows; ++i) {
    double denom = 0.0;
    for (uint32_t j = 0; j < logits.cols; ++j) denom += std::exp(logits.at(i, j));
    total += std::log(denom) - logits.at(i, labels[i]);
  }
  return total / logits.rows;
}

// ------------------------------------------- manual feature reference

std::vector<double> oracle_manual_features(const std::vector<InteractionRecord>& records,
                                           const std::string& account) {
  std::set<int64_t> days;
  std::set<std::string> senders, recipients, contracts;
  u128 received = 0, output = 0;
  uint64_t n_in = 0, n_out = 0, n_calls = 0;

  for (const auto& r : records) {
    const bool as_from = r.from_account == account;
    const bool as_to = r.to_account == account;
    if (!as_from && !as_to) continue;
    const int64_t day = r.timestamp >= 0 ? r.timestamp / 86400 : (r.timestamp - 86399) / 86400;
    days.insert(day);
    if (r.is_contract_call()) {
      if (as_from) {
        n_calls++;
        contracts.insert(r.to_account);
      }
      continue;
    }
    if (as_from) {
      output += r.value.wei;
      n_out++;
      recipients.insert(r.to_account);
    }
    if (as_to) {
      received += r.value.wei;
      n_in++;
      senders.insert(r.from_account);
    }
  }

  const double eth_in = static_cast<double>(received) * 1e-18;
  const double eth_out = static_cast<double>(output) * 1e-18;
  const double d = static_cast<double>(days.size());
  auto ratio = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };

  return {d,
          eth_in,
          static_cast<double>(n_in),
          static_cast<double>(senders.size()),
          eth_out,
          static_cast<double>(n_out),
          static_cast<double>(recipients.size()),
          ratio(eth_in, static_cast<double>(n_in)),
          ratio(eth_in, d),
          ratio(static_cast<double>(n_in), d),
          ratio(eth_out, static_cast<double>(n_out)),
          ratio(eth_out, d),
          ratio(static_cast<double>(n_out), d),
          static_cast<double>(n_calls),
          ratio(static_cast<double>(n_calls), d),
          static_cast<double>(contracts.size())};
}

// ------------------------------------------------------- random inputs

Tensor random_tensor(Rng& rng, uint32_t rows, uint32_t cols, double lo, double hi) {
  Tensor t(rows, cols);
  for (auto& x : t.data) x = rng.uniform(lo, hi);
  return t;
}

AccountSubgraph random_subgraph(Rng& rng, uint32_t max_nodes, uint32_t feat_width,
                                uint8_t label) {
  AccountSubgraph g;
  const uint32_t n = static_cast<uint32_t>(rng.between(1, max_nodes));
  g.center = 0;
  g.node_map.resize(n);
  for (uint32_t i = 0; i < n; ++i) g.node_map[i] = i;
  for (uint32_t s = 0; s < n; ++s)
    for (uint32_t d = 0; d < n; ++d)
      if (rng.bernoulli(0.25)) {
        CoarseEdge e;
        e.src = s;
        e.dst = d;
        e.t = rng.between(1, 5);
        e.w_tilde = Amount{static_cast<u128>(rng.below(1000000))};
        g.edges.push_back(e);
      }
  g.feat_width = feat_width;
  g.feat_rows.resize(n);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < feat_width; ++j)
      if (rng.bernoulli(0.15)) g.feat_rows[i].emplace_back(j, rng.uniform(0.1, 3.0));
  g.label = label;
  return g;
}

// ------------------------------------------------------- FD gradcheck

namespace {

struct JointObjective {
  const graphid::BatchPlan* plan_d;
  const graphid::BatchPlan* plan_1;
  const graphid::BatchPlan* plan_2;
  double dropout_p, lambda, tau;
  uint64_t drop_seed;

  double eval(const graphid::ModelParams& params, graphid::Tape* keep_tape,
              graphid::ParamIds* keep_ids, int* keep_loss) const {
    graphid::Tape local;
    graphid::Tape& tape = keep_tape ? *keep_tape : local;
    graphid::ParamIds pid = graphid::add_params(tape, params);
    // Re-seeding per evaluation pins the dropout masks, so the objective is a
    // fixed deterministic function of the parameters.
    Rng drop(drop_seed);
    auto fd = graphid::model_forward(tape, pid, *plan_d, dropout_p, true, drop, false);
    int ce_d = tape.cross_entropy(fd.logits, plan_d->labels);
    auto f1 = graphid::model_forward(tape, pid, *plan_1, dropout_p, true, drop, true);
    auto f2 = graphid::model_forward(tape, pid, *plan_2, dropout_p, true, drop, true);
    int ce_1 = tape.cross_entropy(f1.logits, plan_1->labels);
    int ce_2 = tape.cross_entropy(f2.logits, plan_2->labels);
    const double third = 1.0 / 3.0;
    int l_pred = tape.lincomb({{third, ce_d}, {third, ce_1}, {third, ce_2}});
    int z1 = tape.normalize_rows(f1.z);
    int z2 = tape.normalize_rows(f2.z);
    int l_self = tape.contrastive_excl(tape.matmul_nt(z1, z2), tau);
    int loss = tape.lincomb({{1.0, l_pred}, {lambda, l_self}});
    if (keep_ids) *keep_ids = pid;
    if (keep_loss) *keep_loss = loss;
    return tape.val(loss).data[0];
  }
};

}  // namespace

GradCheckReport fd_gradcheck(const std::vector<AccountSubgraph>& batch, uint32_t feat_width,
                             uint32_t hidden, double dropout_p, double lambda, double tau,
                             uint64_t seed, double step) {
  const size_t m = batch.size();
  graphid::AugmentSpec s1{graphid::AugmentOp::FeatureMask, 0.2};
  graphid::AugmentSpec s2{graphid::AugmentOp::NodeDrop, 0.2};
  std::vector<AccountSubgraph> v1(m), v2(m);
  std::vector<const AccountSubgraph*> pd(m), p1(m), p2(m);
  for (size_t j = 0; j < m; ++j) {
    Rng r1 = graphid::view_rng(seed, j, 1);
    Rng r2 = graphid::view_rng(seed, j, 2);
    v1[j] = graphid::apply_augment(batch[j], s1, r1);
    v2[j] = graphid::apply_augment(batch[j], s2, r2);
    pd[j] = &batch[j];
    p1[j] = &v1[j];
    p2[j] = &v2[j];
  }
  const bool weighted = (seed % 2) == 0;
  auto plan_d = graphid::build_batch(pd, feat_width, weighted);
  auto plan_1 = graphid::build_batch(p1, feat_width, weighted);
  auto plan_2 = graphid::build_batch(p2, feat_width, weighted);

  JointObjective obj{&plan_d, &plan_1, &plan_2, dropout_p, lambda, tau,
                     graphid::mix_seed(seed, 0xd507)};

  graphid::ModelParams params = graphid::ModelParams::init(feat_width, hidden, 2, seed);

  GradCheckReport rep;
  graphid::Tape tape;
  graphid::ParamIds pid;
  int loss_id = -1;
  rep.loss = obj.eval(params, &tape, &pid, &loss_id);
  tape.backward(loss_id);
  const std::vector<Tensor> grads = graphid::param_grads(tape, pid);

  auto named = params.named();
  for (size_t t = 0; t < named.size(); ++t) {
    Tensor& theta = *named[t].second;
    for (size_t idx = 0; idx < theta.data.size(); ++idx) {
      const double save = theta.data[idx];
      theta.data[idx] = save + step;
      const double f_plus = obj.eval(params, nullptr, nullptr, nullptr);
      theta.data[idx] = save - step;
      const double f_minus = obj.eval(params, nullptr, nullptr, nullptr);
      theta.data[idx] = save;
      const double fd = (f_plus - f_minus) / (2.0 * step);
      const double an = grads[t].data[idx];
      const double rel = std::fabs(an - fd) / std::max({std::fabs(an), std::fabs(fd), 1e-3});
      rep.max_rel_err = std::max(rep.max_rel_err, rel);
      rep.coords_checked++;
    }
  }
  return rep;
}

}  // namespace testsupport
