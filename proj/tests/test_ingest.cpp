#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <zlib.h>

#include "doctest.h"
#include "graphid/record.hpp"
#include "support.hpp"

using namespace graphid;
using testsupport::LedgerSpec;

namespace {

ParseResult parse_text(const std::string& body, const ParseOptions& opt = {}) {
  std::istringstream in(body);
  return parse_records(in, opt);
}

const std::string kHeader =
    "blockNumber,timestamp,from,to,fromIsContract,toIsContract,callingFunction,value\n";

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/graphid_test_") + name;
}

}  // namespace

TEST_CASE("ledger header constant") {
  CHECK(std::string(kLedgerHeader) ==
        "blockNumber,timestamp,from,to,fromIsContract,toIsContract,callingFunction,value");
}

TEST_CASE("amount parsing in ether") {
  auto wei = [](const char* text) { return Amount::parse(text, ValueUnit::Ether)->wei; };
  CHECK(wei("0") == 0);
  CHECK(wei("1") == (unsigned __int128)1000000000000000000ULL);
  CHECK(wei("1.5") == (unsigned __int128)1500000000000000000ULL);
  CHECK(wei("0.000000000000000001") == 1);
  CHECK(wei("2.250") == (unsigned __int128)2250000000000000000ULL);
  // 20-digit whole part exceeds 64 bits but not 128
  CHECK(wei("12345678901234567890") ==
        (unsigned __int128)12345678901234567890ULL * 1000000000000000000ULL);

  CHECK(!Amount::parse("", ValueUnit::Ether));
  CHECK(!Amount::parse("-1", ValueUnit::Ether));
  CHECK(!Amount::parse("1.2.3", ValueUnit::Ether));
  CHECK(!Amount::parse("1.0000000000000000001", ValueUnit::Ether));  // 19 fractional digits
  CHECK(!Amount::parse("abc", ValueUnit::Ether));
  CHECK(!Amount::parse("1e3", ValueUnit::Ether));
  CHECK(!Amount::parse(" 1", ValueUnit::Ether));
}

TEST_CASE("amount parsing in wei") {
  CHECK(Amount::parse("0", ValueUnit::Wei)->wei == 0);
  CHECK(Amount::parse("123", ValueUnit::Wei)->wei == 123);
  CHECK(!Amount::parse("1.5", ValueUnit::Wei));  // wei must be integral
  CHECK(!Amount::parse("-3", ValueUnit::Wei));
}

TEST_CASE("amount canonical rendering round-trips") {
  auto rt = [](const char* text) {
    return Amount::parse(text, ValueUnit::Ether)->str(ValueUnit::Ether);
  };
  CHECK(rt("1.5") == "1.5");
  CHECK(rt("1.50") == "1.5");
  CHECK(rt("0") == "0");
  CHECK(rt("0.000000000000000001") == "0.000000000000000001");
  CHECK(Amount::from_wei(42).str(ValueUnit::Wei) == "42");
  CHECK(Amount::from_milli_ether(2500).str(ValueUnit::Ether) == "2.5");
}

TEST_CASE("amount checked_add overflows loudly") {
  Amount a{~(unsigned __int128)0};
  CHECK_THROWS_AS(a.checked_add(Amount{1}), Error);
  CHECK(Amount{1}.checked_add(Amount{2}).wei == 3);
}

TEST_CASE("parses transfers and contract calls") {
  const std::string body = kHeader +
                           "100,86400,alice,bob,false,false,,1.5\n"
                           "101,90000,alice,dex,false,true,swap(uint256),0\n"
                           "102,86500,bob,alice,0,0,,0.25\n";
  ParseResult r = parse_text(body);
  REQUIRE(r.accepted == 3);
  CHECK(r.rejected == 0);
  CHECK(r.records[0].block_number == 100);
  CHECK(r.records[0].timestamp == 86400);
  CHECK(r.records[0].from_account == "alice");
  CHECK(r.records[0].to_account == "bob");
  CHECK(!r.records[0].is_contract_call());
  CHECK(r.records[0].value.wei == (unsigned __int128)1500000000000000000ULL);
  CHECK(r.records[1].is_contract_call());
  CHECK(*r.records[1].calling_function == "swap(uint256)");
  CHECK(r.records[1].to_is_contract);
  CHECK(r.records[2].value.wei == (unsigned __int128)250000000000000000ULL);
}

TEST_CASE("boolean forms true/false/1/0") {
  const std::string body = kHeader + "1,0,a,b,true,1,,0\n2,0,a,b,0,false,,0\n";
  ParseResult r = parse_text(body);
  REQUIRE(r.accepted == 2);
  CHECK(r.records[0].from_is_contract);
  CHECK(r.records[0].to_is_contract);
  CHECK(!r.records[1].from_is_contract);
  CHECK(!r.records[1].to_is_contract);
}

TEST_CASE("wei unit option") {
  const std::string body = kHeader + "1,0,a,b,false,false,,123456\n";
  ParseResult r = parse_text(body, ParseOptions{ValueUnit::Wei, false});
  REQUIRE(r.accepted == 1);
  CHECK(r.records[0].value.wei == 123456);
}

TEST_CASE("malformed rows are skipped and reported") {
  const std::string body = kHeader +
                           "1,0,a,b,false,false,,1\n"
                           "x,0,a,b,false,false,,1\n"      // bad block number
                           "2,0,a,b,false,false,,-1\n"     // negative value
                           "3,0,a,b,false,false\n"         // wrong field count
                           "4,0,,b,false,false,,1\n"       // empty from
                           "5,0,a,b,maybe,false,,1\n"      // bad bool
                           "6,0,a,b,false,false,doIt(),1\n"  // call into non-contract
                           "7,0,a,b,false,true,doIt(),1\n";
  ParseResult r = parse_text(body);
  CHECK(r.accepted == 2);
  CHECK(r.rejected == 6);
  REQUIRE(r.errors.size() == 6);
  CHECK(r.errors[0].row == 2);  // 1-based data rows
  CHECK(r.errors[5].row == 7);
}

TEST_CASE("strict mode throws on the first bad row") {
  const std::string body = kHeader + "1,0,a,b,false,false,,1\nbad,row\n";
  CHECK_THROWS_AS(parse_text(body, ParseOptions{ValueUnit::Ether, true}), Error);
}

TEST_CASE("header is mandatory and validated") {
  CHECK_THROWS_AS(parse_text("not,a,header\n1,0,a,b,false,false,,1\n"), Error);
  CHECK_THROWS_AS(parse_text(""), Error);
}

TEST_CASE("u64 overflow in block number is rejected") {
  const std::string body = kHeader + "99999999999999999999999,0,a,b,false,false,,1\n";
  ParseResult r = parse_text(body);
  CHECK(r.accepted == 0);
  CHECK(r.rejected == 1);
}

TEST_CASE("csv round-trip preserves records") {
  graphid::Rng rng(411);
  LedgerSpec spec;
  spec.max_records = 300;
  for (int rep = 0; rep < 10; ++rep) {
    auto records = testsupport::random_ledger(rng, spec);
    std::ostringstream out;
    write_records_csv(out, records, ValueUnit::Wei);
    ParseResult back = parse_text(out.str(), ParseOptions{ValueUnit::Wei, true});
    REQUIRE(back.accepted == records.size());
    CHECK(back.records == records);
  }
}

TEST_CASE("binary record pack round-trips") {
  graphid::Rng rng(77);
  LedgerSpec spec;
  spec.max_records = 500;
  auto records = testsupport::random_ledger(rng, spec);
  const std::string path = tmp_path("records.bin");
  save_records(path, records);
  CHECK(load_records(path) == records);
  std::remove(path.c_str());
}

TEST_CASE("record pack rejects garbage") {
  const std::string path = tmp_path("records_bad.bin");
  std::ofstream(path) << "definitely not a record pack";
  CHECK_THROWS_AS(load_records(path), Error);
  CHECK_THROWS_AS(load_records("/nonexistent/nowhere.bin"), Error);
  std::remove(path.c_str());
}

TEST_CASE("gzip ledgers parse transparently") {
  const std::string body = kHeader + "1,0,a,b,false,false,,1.5\n2,3,b,c,false,true,f(),0\n";
  const std::string path = tmp_path("ledger.csv.gz");
  gzFile gz = gzopen(path.c_str(), "wb");
  REQUIRE(gz != nullptr);
  gzwrite(gz, body.data(), static_cast<unsigned>(body.size()));
  gzclose(gz);

  ParseResult r = parse_records_file(path);
  CHECK(r.accepted == 2);
  CHECK(r.records[0].value.wei == (unsigned __int128)1500000000000000000ULL);
  CHECK(r.records[1].is_contract_call());
  std::remove(path.c_str());
}

TEST_CASE("roles resolve contract-wins with conflict count") {
  const std::string body = kHeader +
                           "1,0,a,b,false,true,,1\n"
                           "2,0,b,a,false,false,,1\n"  // b flagged EOA here: conflict
                           "3,0,c,a,false,false,,1\n";
  ParseResult r = parse_text(body);
  REQUIRE(r.accepted == 3);
  RoleMap roles = account_roles(r.records);
  CHECK(roles.roles.at("a") == Role::EOA);
  CHECK(roles.roles.at("b") == Role::CA);
  CHECK(roles.roles.at("c") == Role::EOA);
  CHECK(roles.conflict_warnings == 1);
}
