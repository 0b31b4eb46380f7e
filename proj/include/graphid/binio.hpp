#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "graphid/fixed.hpp"

namespace graphid {

/// Little-endian binary file writer for the snapshot formats. All multi-byte
/// integers are fixed-width little-endian; strings are u32 length + bytes;
/// doubles are raw IEEE-754 bits, so round-trips are bit-exact.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path);
  ~BinaryWriter();

  /// Writes a 4-byte magic tag followed by the format version.
  void magic(const char tag[4], uint32_t version);

  void u8(uint8_t v);
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i64(int64_t v);
  void f64(double v);
  void u128(unsigned __int128 v);
  void amount(const Amount& a) { u128(a.wei); }
  void str(const std::string& s);

  void close();

 private:
  std::ofstream out_;
  std::string path_;
};

/// Bounds-checked reader mirroring BinaryWriter.
class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path);

  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  int64_t i64();
  double f64();
  unsigned __int128 u128();
  Amount amount() { return Amount{u128()}; }
  std::string str();

  bool at_end() const { return pos_ == data_.size(); }
  const std::string& path() const { return path_; }

  /// Verifies a 4-byte magic and returns the u32 version that follows.
  uint32_t expect_magic(const char magic[4]);

 private:
  void need(size_t n);
  std::vector<unsigned char> data_;
  size_t pos_ = 0;
  std::string path_;
};

}  // namespace graphid
