#include "graphid/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "graphid/common.hpp"
#include "graphid/record.hpp"

namespace graphid {
namespace {

constexpr int64_t kBaseTs = 1609459200;  // 2021-01-01T00:00:00Z
constexpr uint64_t kBaseBlock = 11000000;

const char* kFns[] = {"transfer", "approve", "swap", "deposit", "withdraw", "mint"};

std::string hex_id(const char* prefix, uint64_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*llX", prefix, width, (unsigned long long)i);
  return buf;
}

ClassKnobs hub_class() {
  ClassKnobs k;
  k.label = "Exchange";
  k.tag = '0';
  k.count = 200;
  k.fan_lo = 22;  // always above the default sampling budget k=20
  k.fan_hi = 27;
  k.t_lo = 3;  // >= max contract-edge weight, so counterparties always outrank contracts
  k.t_hi = 6;
  k.out_fraction = 0.5;
  k.amt_lo_milli = 50;
  k.amt_hi_milli = 5000;
  k.start_lo_day = 0;
  k.start_hi_day = 160;
  k.span_lo_day = 200;
  k.span_hi_day = 360;
  k.center_calls = true;
  k.ncall_lo = 1;
  k.ncall_hi = 3;
  k.reps_lo = 1;
  k.reps_hi = 2;
  k.pool_lo = 0;
  k.pool_hi = 7;
  k.cross_pool_noise = 0.05;
  return k;
}

ClassKnobs collector_class() {
  ClassKnobs k;
  k.label = "Phish-hack";
  k.tag = '3';
  k.count = 200;
  k.fan_lo = 3;
  k.fan_hi = 6;
  k.t_lo = 2;
  k.t_hi = 4;
  k.out_fraction = 0.08;  // inflow-dominated
  k.amt_lo_milli = 200;
  k.amt_hi_milli = 3000;
  k.start_lo_day = 0;
  k.start_hi_day = 335;
  k.span_lo_day = 5;
  k.span_hi_day = 25;
  k.center_calls = false;  // counterparties call, keeping contracts at the final hop
  k.ncall_lo = 1;
  k.ncall_hi = 2;
  k.reps_lo = 1;
  k.reps_hi = 2;
  k.pool_lo = 8;
  k.pool_hi = 15;
  k.cross_pool_noise = 0.15;
  return k;
}

ClassKnobs featureless_class(const char* label, char tag) {
  ClassKnobs k;
  k.label = label;
  k.tag = tag;
  k.count = 60;
  k.fan_lo = 4;
  k.fan_hi = 7;
  k.t_lo = 2;
  k.t_hi = 4;
  k.out_fraction = 0.5;
  k.amt_lo_milli = 100;
  k.amt_hi_milli = 2000;
  k.start_lo_day = 0;
  k.start_hi_day = 300;
  k.span_lo_day = 10;
  k.span_hi_day = 60;
  k.center_calls = false;
  k.ncall_lo = 1;
  k.ncall_hi = 2;
  k.reps_lo = 1;
  k.reps_hi = 2;
  k.pool_lo = 0;
  k.pool_hi = 15;  // one shared pool, so calls carry no class signal
  k.cross_pool_noise = 0.0;
  return k;
}

}  // namespace

SynthProfile SynthProfile::planted() {
  SynthProfile p;
  p.name = "planted";
  p.classes = {hub_class(), collector_class()};
  p.filler_pairs = 10000;
  p.filler_accounts = 4000;
  p.filler_callers = 1500;
  return p;
}

SynthProfile SynthProfile::null_profile() {
  SynthProfile p;
  p.name = "null";
  p.classes = {featureless_class("Exchange", '0'), featureless_class("Phish-hack", '3')};
  p.filler_pairs = 2000;
  p.filler_accounts = 1000;
  p.filler_callers = 300;
  return p;
}

SynthProfile SynthProfile::by_name(const std::string& name) {
  if (name == "planted") return planted();
  if (name == "null") return null_profile();
  throw Error("unknown synth profile: " + name + " (expected planted or null)");
}

SynthResult generate_ledger(const SynthProfile& profile, uint64_t seed, uint32_t scale,
                            const std::string& ledger_path, const std::string& labels_path,
                            const std::string& manifest_path) {
  if (scale < 1) throw Error("synth scale must be >= 1");
  if (profile.contracts < 1) throw Error("synth profile needs at least one contract");
  Rng rng(mix_seed(seed, 0x746e7973));
  std::vector<InteractionRecord> recs;
  std::vector<std::pair<std::string, std::string>> labels;
  uint64_t leaf_counter = 0;
  uint64_t accounts = 0;

  auto transfer = [&](std::string from, std::string to, int64_t ts, uint64_t milli) {
    InteractionRecord r;
    r.block_number = kBaseBlock + uint64_t(ts - kBaseTs) / 13;
    r.timestamp = ts;
    r.from_account = std::move(from);
    r.to_account = std::move(to);
    r.value = Amount::from_milli_ether(milli);
    recs.push_back(std::move(r));
  };
  auto call = [&](std::string from, uint32_t contract, int64_t ts) {
    InteractionRecord r;
    r.block_number = kBaseBlock + uint64_t(ts - kBaseTs) / 13;
    r.timestamp = ts;
    r.from_account = std::move(from);
    r.to_account = hex_id("0xCC", contract, 2);
    r.to_is_contract = true;
    r.calling_function = kFns[rng.below(6)];
    recs.push_back(std::move(r));
  };

  for (const auto& k : profile.classes) {
    if (k.pool_hi >= profile.contracts || k.pool_lo > k.pool_hi)
      throw Error("synth profile: bad contract pool for class " + k.label);
    for (uint32_t i = 0; i < k.count; ++i) {
      std::string center = hex_id("0xAA", i, 3);
      center.insert(4, 1, k.tag);
      labels.emplace_back(center, k.label);
      uint32_t fan = uint32_t(rng.between(k.fan_lo, k.fan_hi));
      int64_t start = kBaseTs + int64_t(rng.between(k.start_lo_day, k.start_hi_day)) * 86400;
      int64_t span = int64_t(rng.between(k.span_lo_day, k.span_hi_day)) * 86400;
      std::vector<std::string> leaves(fan);
      for (auto& l : leaves) l = hex_id("0xBB", leaf_counter++, 6);
      for (const auto& l : leaves) {
        uint64_t t = rng.between(k.t_lo, k.t_hi);
        for (uint64_t j = 0; j < t; ++j) {
          int64_t ts = start + int64_t(rng.below(uint64_t(span)));
          uint64_t amt = rng.between(k.amt_lo_milli, k.amt_hi_milli);
          if (rng.bernoulli(k.out_fraction))
            transfer(center, l, ts, amt);
          else
            transfer(l, center, ts, amt);
        }
      }
      std::vector<std::string> callers;
      if (k.center_calls)
        callers.push_back(center);
      else
        callers = leaves;
      std::vector<uint32_t> pool;
      for (uint32_t c = k.pool_lo; c <= k.pool_hi; ++c) pool.push_back(c);
      for (const auto& caller : callers) {
        rng.shuffle(pool);
        uint32_t n = std::min<uint32_t>(uint32_t(rng.between(k.ncall_lo, k.ncall_hi)),
                                        uint32_t(pool.size()));
        for (uint32_t ci = 0; ci < n; ++ci) {
          uint64_t reps = rng.between(k.reps_lo, k.reps_hi);
          for (uint64_t rep = 0; rep < reps; ++rep)
            call(caller, pool[ci], start + int64_t(rng.below(uint64_t(span))));
        }
        if (k.cross_pool_noise > 0.0 && rng.bernoulli(k.cross_pool_noise))
          call(caller, uint32_t(rng.below(profile.contracts)),
               start + int64_t(rng.below(uint64_t(span))));
      }
      accounts += 1 + fan;
    }
  }

  uint64_t n_fill = uint64_t(profile.filler_accounts) * scale;
  uint64_t n_pairs = uint64_t(profile.filler_pairs) * scale;
  uint64_t n_callers = std::min(uint64_t(profile.filler_callers) * scale, n_fill);
  accounts += n_fill;
  const int64_t whole = int64_t(360) * 86400;
  if (n_fill >= 2) {
    for (uint64_t p = 0; p < n_pairs; ++p) {
      uint64_t a = rng.below(n_fill);
      uint64_t b = rng.below(n_fill);
      if (a == b) b = (b + 1) % n_fill;
      std::string fa = hex_id("0xBE", a, 6);
      std::string fb = hex_id("0xBE", b, 6);
      uint64_t t = rng.between(1, 3);
      for (uint64_t j = 0; j < t; ++j) {
        int64_t ts = kBaseTs + int64_t(rng.below(uint64_t(whole)));
        uint64_t amt = rng.between(1, 1000);
        if (rng.bernoulli(0.5))
          transfer(fa, fb, ts, amt);
        else
          transfer(fb, fa, ts, amt);
      }
    }
  }
  for (uint64_t i = 0; i < n_callers; ++i) {
    uint64_t n = rng.between(1, 2);
    for (uint64_t j = 0; j < n; ++j)
      call(hex_id("0xBE", i, 6), uint32_t(rng.below(profile.contracts)),
           kBaseTs + int64_t(rng.below(uint64_t(whole))));
  }

  std::stable_sort(recs.begin(), recs.end(),
                   [](const InteractionRecord& a, const InteractionRecord& b) {
                     return a.timestamp < b.timestamp;
                   });

  {
    std::ofstream out(ledger_path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + ledger_path);
    write_records_csv(out, recs, ValueUnit::Ether);
    out.close();
    if (!out) throw Error("write failed: " + ledger_path);
  }
  {
    std::sort(labels.begin(), labels.end());
    std::ofstream out(labels_path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + labels_path);
    out << "account,label\n";
    for (const auto& [acct, label] : labels) out << acct << ',' << label << '\n';
    out.close();
    if (!out) throw Error("write failed: " + labels_path);
  }
  {
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + manifest_path);
    out << "profile=" << profile.name << '\n';
    out << "seed=" << seed << '\n';
    out << "scale=" << scale << '\n';
    out << "records=" << recs.size() << '\n';
    out << "labeled=" << labels.size() << '\n';
    out << "accounts=" << accounts << '\n';
    out << "contracts=" << profile.contracts << '\n';
    for (const auto& k : profile.classes)
      out << "class." << k.label << '=' << k.count << '\n';
    out.close();
    if (!out) throw Error("write failed: " + manifest_path);
  }

  return SynthResult{recs.size(), labels.size(), accounts};
}

}  // namespace graphid
