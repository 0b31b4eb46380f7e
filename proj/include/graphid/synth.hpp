#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace graphid {

/// Generator knobs for one identity class. Each labeled account gets a star
/// of dedicated counterparties plus contract-call activity; whether the
/// account itself or its counterparties place the calls decides where
/// contract nodes sit relative to the account's sampled neighborhood.
struct ClassKnobs {
  std::string label;       // vocabulary name
  char tag = '0';          // digit embedded in the account id
  uint32_t count = 0;      // labeled accounts of this class
  uint32_t fan_lo = 0, fan_hi = 0;  // dedicated counterparties
  uint32_t t_lo = 0, t_hi = 0;      // transfers per counterparty
  double out_fraction = 0.5;        // P(transfer goes account -> counterparty)
  uint32_t amt_lo_milli = 0, amt_hi_milli = 0;  // transfer size (milli-ether)
  uint32_t start_lo_day = 0, start_hi_day = 0;  // activity window start
  uint32_t span_lo_day = 1, span_hi_day = 1;    // activity window length
  bool center_calls = false;        // account (true) or counterparties place calls
  uint32_t ncall_lo = 0, ncall_hi = 0;  // distinct contracts per caller
  uint32_t reps_lo = 1, reps_hi = 1;    // calls per chosen contract
  uint32_t pool_lo = 0, pool_hi = 0;    // contract index range used
  double cross_pool_noise = 0.0;        // P(one extra call anywhere)
};

struct SynthProfile {
  std::string name;
  uint32_t contracts = 16;
  std::vector<ClassKnobs> classes;
  // Background noise, multiplied by --scale: random transfer pairs plus a few
  // contract callers, disjoint from the labeled stars.
  uint32_t filler_pairs = 0;
  uint32_t filler_accounts = 0;
  uint32_t filler_callers = 0;

  /// Two well-separated classes: transfer hubs whose fan always outnumbers
  /// the sampling budget, and sparse inflow collectors whose counterparties
  /// touch a disjoint contract pool.
  static SynthProfile planted();
  /// Two classes drawn from one distribution; labels carry no signal.
  static SynthProfile null_profile();
  static SynthProfile by_name(const std::string& name);
};

struct SynthResult {
  uint64_t records = 0;
  uint64_t labeled = 0;
  uint64_t accounts = 0;  // labeled + counterparties + filler (not contracts)
};

/// Writes a deterministic ledger CSV, a label CSV ("account,label") and a
/// key=value manifest. Identical (profile, seed, scale) give byte-identical
/// files.
SynthResult generate_ledger(const SynthProfile& profile, uint64_t seed, uint32_t scale,
                            const std::string& ledger_path, const std::string& labels_path,
                            const std::string& manifest_path);

}  // namespace graphid
