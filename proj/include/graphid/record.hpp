#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphid/fixed.hpp"

namespace graphid {

/// One parsed transaction or contract call from the raw ledger.
struct InteractionRecord {
  uint64_t block_number = 0;
  int64_t timestamp = 0;  // unix seconds
  std::string from_account;
  std::string to_account;
  bool from_is_contract = false;
  bool to_is_contract = false;
  std::optional<std::string> calling_function;  // present iff contract call
  Amount value;  // stored in wei regardless of input unit

  bool is_contract_call() const { return calling_function.has_value(); }
  bool operator==(const InteractionRecord&) const = default;
};

struct RowError {
  uint64_t row = 0;  // 1-based data row index (header excluded)
  std::string message;
};

struct ParseOptions {
  ValueUnit unit = ValueUnit::Ether;  // unit the ledger's value column is written in
  bool strict = false;                // fail on first bad row instead of skip-and-count
};

struct ParseResult {
  std::vector<InteractionRecord> records;  // accepted records in file order
  uint64_t accepted = 0;
  uint64_t rejected = 0;
  std::vector<RowError> errors;  // one entry per rejected row (non-strict mode)
};

extern const char* const kLedgerHeader;

/// Parses a header-bearing ledger CSV. In strict mode the first malformed row
/// throws Error; otherwise bad rows are skipped and reported in `errors`.
ParseResult parse_records(std::istream& in, const ParseOptions& opt = {});

/// File variant; transparently decompresses when the name ends in ".gz".
ParseResult parse_records_file(const std::string& path, const ParseOptions& opt = {});

/// Writes records back out in the canonical CSV form (header included,
/// canonical decimal rendering of values in the requested unit).
void write_records_csv(std::ostream& out, const std::vector<InteractionRecord>& records,
                       ValueUnit unit);

enum class Role : uint8_t { EOA = 0, CA = 1 };

struct RoleMap {
  std::map<std::string, Role> roles;
  uint64_t conflict_warnings = 0;  // accounts flagged both contract and non-contract
};

/// Assigns each account its role; any contract flag wins (CA-wins resolution).
RoleMap account_roles(const std::vector<InteractionRecord>& records);

/// Binary snapshot of parsed records; round-trips bit-exactly.
void save_records(const std::string& path, const std::vector<InteractionRecord>& records);
std::vector<InteractionRecord> load_records(const std::string& path);

}  // namespace graphid
