#pragma once

// HMT1 heatmap interchange format:
//   bytes 0-3  ASCII "HMT1"
//   then u32 L, u32 H, u32 W (little-endian)
//   then L*H*W IEEE-754 binary32 values, little-endian, (label, row, col) order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "clothparse/error.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

namespace hmt1_detail {

inline constexpr char kMagic[4] = {'H', 'M', 'T', '1'};
// Refuse to allocate more than this many values from an untrusted header.
inline constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 31;

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  v = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
      (std::uint32_t{b[3]} << 24);
  return true;
}

}  // namespace hmt1_detail

inline void write_hmt1(std::ostream& out, const HeatmapStack& h) {
  using namespace hmt1_detail;
  constexpr auto u32max = std::numeric_limits<std::uint32_t>::max();
  if (h.channels() > u32max || h.height() > u32max || h.width() > u32max) {
    throw InvalidArgument("hmt1: dimension exceeds 32 bits");
  }
  out.write(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(h.channels()));
  put_u32(out, static_cast<std::uint32_t>(h.height()));
  put_u32(out, static_cast<std::uint32_t>(h.width()));
  for (float v : h.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw IoError("hmt1: write failed");
}

// Reads one block; stops right after the payload so blocks can be chained.
inline HeatmapStack read_hmt1(std::istream& in) {
  using namespace hmt1_detail;
  char magic[4];
  if (!in.read(magic, 4)) throw FormatError("hmt1: truncated header");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("hmt1: bad magic");
  std::uint32_t l = 0, hgt = 0, w = 0;
  if (!get_u32(in, l) || !get_u32(in, hgt) || !get_u32(in, w)) {
    throw FormatError("hmt1: truncated header");
  }
  std::uint64_t count = std::uint64_t{l} * hgt * w;
  if (count > kMaxValues) throw FormatError("hmt1: dims overflow");
  HeatmapStack h(l, hgt, w);
  for (auto& v : h.values()) {
    std::uint32_t bits = 0;
    if (!get_u32(in, bits)) throw FormatError("hmt1: truncated payload");
    v = std::bit_cast<float>(bits);
  }
  return h;
}

inline void save_hmt1(const HeatmapStack& h, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_hmt1(out, h);
}

inline HeatmapStack load_hmt1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  HeatmapStack h = read_hmt1(in);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("hmt1: trailing bytes after payload in " + path);
  }
  return h;
}

inline std::string encode_hmt1(const HeatmapStack& h) {
  std::ostringstream out(std::ios::binary);
  write_hmt1(out, h);
  return out.str();
}

inline HeatmapStack decode_hmt1(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  HeatmapStack h = read_hmt1(in);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("hmt1: trailing bytes after payload");
  return h;
}

}  // namespace clothparse
