#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "clothparse/error.hpp"
#include "clothparse/gate/features.hpp"
#include "clothparse/gate/forward.hpp"
#include "clothparse/hmt1.hpp"

namespace clothparse {

inline constexpr std::size_t kDescriptorDim = kEncoderHidden;

using Descriptor = std::vector<float>;

// The encoder's post-ReLU hidden layer for an image.
inline Descriptor extract_descriptor(const RgbImage& image, const ToyModelParams& model) {
  auto enc = encoder_forward(extract_features(image), model);
  return Descriptor(enc.hidden.begin(), enc.hidden.end());
}

struct IndexEntry {
  std::string id;
  Descriptor vector;
};

struct Neighbor {
  std::string id;
  double distance;
};

inline double euclidean(const Descriptor& a, const Descriptor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = double(a[i]) - double(b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

// Linear-scan descriptor index.
class DescriptorIndex {
 public:
  void add(std::string id, Descriptor v) {
    if (v.size() != kDescriptorDim) throw InvalidArgument("index: descriptor must have 256 entries");
    if (!ids_.insert(id).second) throw InvalidArgument("index: duplicate id " + id);
    entries_.push_back({std::move(id), std::move(v)});
  }

  const std::vector<IndexEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Ascending Euclidean distance, ties by id; min(k, size) results.
  std::vector<Neighbor> query(const Descriptor& q, std::size_t k) const {
    if (k < 1) throw InvalidArgument("query: k must be >= 1");
    if (entries_.empty()) throw InvalidArgument("query: index is empty");
    if (q.size() != kDescriptorDim) throw InvalidArgument("query: dimension mismatch");
    std::vector<Neighbor> all;
    all.reserve(entries_.size());
    for (const auto& e : entries_) all.push_back({e.id, euclidean(q, e.vector)});
    auto cmp = [](const Neighbor& a, const Neighbor& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    };
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + std::ptrdiff_t(k), all.end(), cmp);
    all.resize(k);
    return all;
  }

  // Vectors as one HMT1 block (1 x N x 256) plus "<path>.json" with the ids.
  void save(const std::string& path) const {
    HeatmapStack block(1, entries_.size(), kDescriptorDim);
    for (std::size_t i = 0; i < entries_.size(); ++i)
      for (std::size_t k = 0; k < kDescriptorDim; ++k) block(0, i, k) = entries_[i].vector[k];
    save_hmt1(block, path);
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& e : entries_) ids.push_back(e.id);
    std::ofstream out(path + ".json");
    if (!out) throw IoError("cannot write " + path + ".json");
    out << nlohmann::json{{"ids", ids}}.dump(2) << "\n";
  }

  static DescriptorIndex load(const std::string& path) {
    HeatmapStack block = load_hmt1(path);
    std::ifstream in(path + ".json");
    if (!in) throw IoError("cannot open " + path + ".json");
    std::vector<std::string> ids;
    try {
      ids = nlohmann::json::parse(in).at("ids").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(std::string("index sidecar: ") + ex.what());
    }
    if (block.channels() != 1 || block.width() != kDescriptorDim || block.height() != ids.size()) {
      throw FormatError("index: vector block does not match id sidecar");
    }
    DescriptorIndex idx;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      Descriptor v(kDescriptorDim);
      for (std::size_t k = 0; k < kDescriptorDim; ++k) v[k] = block(0, i, k);
      idx.add(ids[i], std::move(v));
    }
    return idx;
  }

 private:
  std::vector<IndexEntry> entries_;
  std::set<std::string> ids_;
};

inline std::vector<Neighbor> query_nearest(const Descriptor& q, const DescriptorIndex& index,
                                           std::size_t k) {
  return index.query(q, k);
}

}  // namespace clothparse
