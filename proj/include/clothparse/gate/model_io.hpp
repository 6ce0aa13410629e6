#pragma once

// Model file layout:
//   "HMTM", u32 little-endian header length, JSON header
//   {"labels": L, "feature_dim": D, "tensors": [{"name": ..., "shape": [rows, cols]}, ...]}
//   then one HMT1 block per tensor, in header order, with dims (1, rows, cols).

#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "clothparse/gate/model.hpp"
#include "clothparse/hmt1.hpp"

namespace clothparse {

inline void save_model(const ToyModelParams& m, const std::string& path) {
  m.validate();
  nlohmann::json header{{"labels", m.labels()}, {"feature_dim", m.feature_dim()}};
  header["tensors"] = nlohmann::json::array();
  for (const auto* t : m.blocks()) header["tensors"].push_back({{"name", t->name}, {"shape", {t->rows, t->cols}}});
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path);
  out.write("HMTM", 4);
  hmt1_detail::put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto* t : m.blocks()) {
    HeatmapStack block(1, t->rows, t->cols);
    for (std::size_t i = 0; i < t->data.size(); ++i) block.values()[i] = static_cast<float>(t->data[i]);
    write_hmt1(out, block);
  }
  if (!out) throw IoError("short write to model " + path);
}

inline ToyModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "HMTM", 4) != 0) {
    throw FormatError("model " + path + ": bad magic");
  }
  std::uint32_t len = 0;
  if (!hmt1_detail::get_u32(in, len) || len > (1u << 24)) throw FormatError("model: bad header length");
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) throw FormatError("model: truncated header");

  ToyModelParams m;
  try {
    auto header = nlohmann::json::parse(text);
    m = ToyModelParams(header.at("labels").get<std::size_t>(),
                       header.at("feature_dim").get<std::size_t>());
    auto blocks = m.blocks();
    const auto& tensors = header.at("tensors");
    if (tensors.size() != blocks.size()) throw FormatError("model: unexpected tensor count");
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (tensors[b].at("name").get<std::string>() != blocks[b]->name) {
        throw FormatError("model: unexpected tensor " + tensors[b].at("name").get<std::string>());
      }
      HeatmapStack block = read_hmt1(in);
      if (block.channels() != 1 || block.height() != blocks[b]->rows ||
          block.width() != blocks[b]->cols) {
        throw FormatError("model: shape mismatch for " + blocks[b]->name);
      }
      for (std::size_t i = 0; i < block.size(); ++i) blocks[b]->data[i] = block.values()[i];
    }
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("model header: ") + ex.what());
  }
  m.validate();
  return m;
}

}  // namespace clothparse
