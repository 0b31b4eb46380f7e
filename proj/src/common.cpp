#include "graphid/binio.hpp"

#include <bit>
#include <cstring>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "graphid/common.hpp"

namespace graphid {

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
#endif
}

BinaryWriter::BinaryWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw Error("cannot open '" + path + "' for writing");
}

BinaryWriter::~BinaryWriter() = default;

void BinaryWriter::magic(const char tag[4], uint32_t version) {
  out_.write(tag, 4);
  u32(version);
}

void BinaryWriter::u8(uint8_t v) { out_.put(static_cast<char>(v)); }

void BinaryWriter::u32(uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out_.write(b, 4);
}

void BinaryWriter::u64(uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out_.write(b, 8);
}

void BinaryWriter::i64(int64_t v) { u64(static_cast<uint64_t>(v)); }

void BinaryWriter::f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

void BinaryWriter::u128(unsigned __int128 v) {
  u64(static_cast<uint64_t>(v));
  u64(static_cast<uint64_t>(v >> 64));
}

void BinaryWriter::str(const std::string& s) {
  if (s.size() > UINT32_MAX) throw Error("string too long for snapshot format");
  u32(static_cast<uint32_t>(s.size()));
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::close() {
  out_.close();
  if (!out_) throw Error("write failure on '" + path_ + "'");
}

BinaryReader::BinaryReader(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  const std::streamsize size = in.tellg();
  in.seekg(0);
  data_.resize(static_cast<size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(data_.data()), size))
    throw Error("read failure on '" + path + "'");
}

void BinaryReader::need(size_t n) {
  if (pos_ + n > data_.size()) throw Error("truncated file '" + path_ + "'");
}

uint8_t BinaryReader::u8() {
  need(1);
  return data_[pos_++];
}

uint32_t BinaryReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

uint64_t BinaryReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

int64_t BinaryReader::i64() { return static_cast<int64_t>(u64()); }

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

unsigned __int128 BinaryReader::u128() {
  const uint64_t lo = u64();
  const uint64_t hi = u64();
  return (static_cast<unsigned __int128>(hi) << 64) | lo;
}

std::string BinaryReader::str() {
  const uint32_t n = u32();
  need(n);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

uint32_t BinaryReader::expect_magic(const char magic[4]) {
  need(4);
  if (std::memcmp(data_.data() + pos_, magic, 4) != 0)
    throw Error("bad magic in '" + path_ + "' (expected " + std::string(magic, 4) + ")");
  pos_ += 4;
  return u32();
}

}  // namespace graphid
