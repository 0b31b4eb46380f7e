#include "graphid/record.hpp"

#include <zlib.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "graphid/binio.hpp"
#include "graphid/common.hpp"

namespace graphid {

const char* const kLedgerHeader =
    "blockNumber,timestamp,from,to,fromIsContract,toIsContract,callingFunction,value";

namespace {

constexpr char kRecordsMagic[4] = {'B', 'G', 'C', 'R'};
constexpr uint32_t kRecordsVersion = 1;

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0") {
    out = false;
    return true;
  }
  return false;
}

bool parse_u64(const std::string& s, uint64_t& out) {
  if (s.empty()) return false;
  uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    const uint64_t d = static_cast<uint64_t>(c - '0');
    if (v > (UINT64_MAX - d) / 10) return false;
    v = v * 10 + d;
  }
  out = v;
  return true;
}

// Splits on commas; the ledger format has no quoting.
void split_fields(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Returns an error message, or empty string on success.
std::string parse_row(const std::string& line, const ParseOptions& opt,
                      std::vector<std::string>& fields, InteractionRecord& rec) {
  split_fields(line, fields);
  if (fields.size() != 8)
    return "expected 8 fields, got " + std::to_string(fields.size());
  if (!parse_u64(fields[0], rec.block_number)) return "non-numeric block number";
  uint64_t ts = 0;
  if (!parse_u64(fields[1], ts) || ts > static_cast<uint64_t>(INT64_MAX))
    return "non-numeric timestamp";
  rec.timestamp = static_cast<int64_t>(ts);
  if (fields[2].empty()) return "empty from account";
  if (fields[3].empty()) return "empty to account";
  rec.from_account = fields[2];
  rec.to_account = fields[3];
  if (!parse_bool(fields[4], rec.from_is_contract)) return "unparsable fromIsContract";
  if (!parse_bool(fields[5], rec.to_is_contract)) return "unparsable toIsContract";
  if (!fields[6].empty()) {
    if (!rec.to_is_contract) return "calling function on a non-contract recipient";
    rec.calling_function = fields[6];
  } else {
    rec.calling_function.reset();
  }
  const auto value = Amount::parse(fields[7], opt.unit);
  if (!value) return "non-numeric value";
  rec.value = *value;
  return {};
}

}  // namespace

ParseResult parse_records(std::istream& in, const ParseOptions& opt) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty ledger: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLedgerHeader)
    throw Error("unexpected ledger header '" + line + "'");

  ParseResult result;
  std::vector<std::string> fields;
  InteractionRecord rec;
  uint64_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row;
    std::string err = parse_row(line, opt, fields, rec);
    if (err.empty()) {
      result.records.push_back(rec);
      ++result.accepted;
    } else {
      if (opt.strict) throw Error("row " + std::to_string(row) + ": " + err);
      result.errors.push_back(RowError{row, std::move(err)});
      ++result.rejected;
    }
  }
  return result;
}

ParseResult parse_records_file(const std::string& path, const ParseOptions& opt) {
  if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw Error("cannot open '" + path + "' for reading");
    std::string all;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) all.append(buf, static_cast<size_t>(n));
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw Error("gzip decompression failed on '" + path + "'");
    std::istringstream in(all);
    return parse_records(in, opt);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return parse_records(in, opt);
}

void write_records_csv(std::ostream& out, const std::vector<InteractionRecord>& records,
                       ValueUnit unit) {
  out << kLedgerHeader << '\n';
  for (const auto& r : records) {
    out << r.block_number << ',' << r.timestamp << ',' << r.from_account << ','
        << r.to_account << ',' << (r.from_is_contract ? "true" : "false") << ','
        << (r.to_is_contract ? "true" : "false") << ','
        << (r.calling_function ? *r.calling_function : std::string()) << ','
        << r.value.str(unit) << '\n';
  }
}

RoleMap account_roles(const std::vector<InteractionRecord>& records) {
  // Bit 0: seen flagged contract, bit 1: seen flagged non-contract.
  std::map<std::string, uint8_t> seen;
  for (const auto& r : records) {
    seen[r.from_account] |= r.from_is_contract ? 1 : 2;
    seen[r.to_account] |= r.to_is_contract ? 1 : 2;
  }
  RoleMap out;
  for (const auto& [id, bits] : seen) {
    out.roles.emplace(id, (bits & 1) ? Role::CA : Role::EOA);
    if (bits == 3) ++out.conflict_warnings;
  }
  return out;
}

void save_records(const std::string& path, const std::vector<InteractionRecord>& records) {
  BinaryWriter w(path);
  w.magic(kRecordsMagic, kRecordsVersion);
  w.u64(records.size());
  for (const auto& r : records) {
    w.u64(r.block_number);
    w.i64(r.timestamp);
    w.str(r.from_account);
    w.str(r.to_account);
    uint8_t flags = 0;
    if (r.from_is_contract) flags |= 1;
    if (r.to_is_contract) flags |= 2;
    if (r.calling_function) flags |= 4;
    w.u8(flags);
    if (r.calling_function) w.str(*r.calling_function);
    w.amount(r.value);
  }
  w.close();
}

std::vector<InteractionRecord> load_records(const std::string& path) {
  BinaryReader r(path);
  const uint32_t version = r.expect_magic(kRecordsMagic);
  if (version != kRecordsVersion)
    throw Error("unsupported records version in '" + path + "'");
  const uint64_t count = r.u64();
  std::vector<InteractionRecord> records;
  records.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    InteractionRecord rec;
    rec.block_number = r.u64();
    rec.timestamp = r.i64();
    rec.from_account = r.str();
    rec.to_account = r.str();
    const uint8_t flags = r.u8();
    rec.from_is_contract = flags & 1;
    rec.to_is_contract = flags & 2;
    if (flags & 4) rec.calling_function = r.str();
    rec.value = r.amount();
    records.push_back(std::move(rec));
  }
  if (!r.at_end()) throw Error("trailing bytes in '" + path + "'");
  return records;
}

}  // namespace graphid
