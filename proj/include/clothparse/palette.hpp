#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "clothparse/error.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

struct PaletteEntry {
  std::size_t index = 0;
  std::string name;
  std::array<std::uint8_t, 3> color{};
  friend bool operator==(const PaletteEntry&, const PaletteEntry&) = default;
};

// Ordered label set. Indices are exactly 0..L-1 and index 0 is "background".
class Palette {
 public:
  explicit Palette(std::vector<PaletteEntry> entries) : entries_(std::move(entries)) {
    validate();
  }

  std::size_t size() const { return entries_.size(); }
  const PaletteEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<PaletteEntry>& entries() const { return entries_; }

  bool contains(const LabelMask& mask) const {
    for (Label v : mask.values()) {
      if (v >= size()) return false;
    }
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& e : entries_) {
      labels.push_back({{"index", e.index},
                        {"name", e.name},
                        {"color", {e.color[0], e.color[1], e.color[2]}}});
    }
    return {{"labels", labels}};
  }

  static Palette from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("labels") || !j["labels"].is_array()) {
      throw FormatError("palette: expected object with a \"labels\" array");
    }
    std::vector<PaletteEntry> entries;
    for (const auto& item : j["labels"]) {
      PaletteEntry e;
      try {
        e.index = item.at("index").get<std::size_t>();
        e.name = item.at("name").get<std::string>();
        const auto& c = item.at("color");
        if (!c.is_array() || c.size() != 3) throw FormatError("palette: color must be [r,g,b]");
        for (int k = 0; k < 3; ++k) {
          int v = c[k].get<int>();
          if (v < 0 || v > 255) throw FormatError("palette: color component out of 0..255");
          e.color[k] = static_cast<std::uint8_t>(v);
        }
      } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("palette: ") + ex.what());
      }
      entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(),
              [](const PaletteEntry& a, const PaletteEntry& b) { return a.index < b.index; });
    return Palette(std::move(entries));
  }

  friend bool operator==(const Palette&, const Palette&) = default;

 private:
  void validate() const {
    if (entries_.empty()) throw FormatError("palette: no labels");
    if (entries_.size() > 256) throw FormatError("palette: more than 256 labels");
    std::set<std::string> names;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].index != i) {
        if (i > 0 && entries_[i].index == entries_[i - 1].index) {
          throw FormatError("palette: duplicate index " + std::to_string(entries_[i].index));
        }
        throw FormatError("palette: gapped indices (missing " + std::to_string(i) + ")");
      }
      if (!names.insert(entries_[i].name).second) {
        throw FormatError("palette: duplicate name \"" + entries_[i].name + "\"");
      }
    }
    if (entries_[0].name != "background") {
      throw FormatError("palette: index 0 must be \"background\"");
    }
  }

  std::vector<PaletteEntry> entries_;
};

inline Palette load_palette(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open palette " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& ex) {
    throw FormatError("palette " + path + ": " + ex.what());
  }
  return Palette::from_json(j);
}

inline void save_palette(const Palette& palette, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write palette " + path);
  out << palette.to_json().dump(2) << "\n";
}

}  // namespace clothparse
