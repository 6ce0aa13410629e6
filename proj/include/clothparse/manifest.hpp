#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "clothparse/error.hpp"
#include "clothparse/random.hpp"

namespace clothparse {

enum class Split { train, val, test };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw FormatError("unknown split \"" + s + "\"");
}

struct ManifestItem {
  std::string id;
  std::string image;
  std::string mask;
  Split split = Split::train;
  friend bool operator==(const ManifestItem&, const ManifestItem&) = default;
};

class DatasetManifest {
 public:
  DatasetManifest() = default;
  explicit DatasetManifest(std::vector<ManifestItem> items) : items_(std::move(items)) {
    std::set<std::string> seen;
    for (const auto& it : items_) {
      if (!seen.insert(it.id).second) throw FormatError("manifest: duplicate id " + it.id);
    }
  }

  const std::vector<ManifestItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  std::vector<ManifestItem> subset(Split s) const {
    std::vector<ManifestItem> out;
    for (const auto& it : items_)
      if (it.split == s) out.push_back(it);
    return out;
  }

  const ManifestItem& find(const std::string& id) const {
    for (const auto& it : items_)
      if (it.id == id) return it;
    throw InvalidArgument("manifest: unknown id " + id);
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& it : items_) {
      arr.push_back(
          {{"id", it.id}, {"image", it.image}, {"mask", it.mask}, {"split", to_string(it.split)}});
    }
    return arr;
  }

  static DatasetManifest from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw FormatError("manifest: expected a JSON list");
    std::vector<ManifestItem> items;
    try {
      for (const auto& e : j) {
        items.push_back({e.at("id").get<std::string>(), e.at("image").get<std::string>(),
                         e.at("mask").get<std::string>(),
                         parse_split(e.at("split").get<std::string>())});
      }
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(std::string("manifest: ") + ex.what());
    }
    return DatasetManifest(std::move(items));
  }

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;

 private:
  std::vector<ManifestItem> items_;
};

// Loads a manifest and resolves relative paths against the manifest's own
// directory. Every referenced file must exist.
inline DatasetManifest load_manifest(const std::string& path) {
  namespace fs = std::filesystem;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& ex) {
    throw FormatError("manifest " + path + ": " + ex.what());
  }
  DatasetManifest raw = DatasetManifest::from_json(j);
  fs::path base = fs::path(path).parent_path();
  std::vector<ManifestItem> items;
  for (auto it : raw.items()) {
    for (std::string* p : {&it.image, &it.mask}) {
      fs::path fp(*p);
      if (fp.is_relative()) fp = base / fp;
      if (!fs::exists(fp)) throw IoError("manifest item " + it.id + ": missing " + fp.string());
      *p = fp.string();
    }
    items.push_back(std::move(it));
  }
  return DatasetManifest(std::move(items));
}

inline void save_manifest(const DatasetManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path);
  out << m.to_json().dump(2) << "\n";
}

struct SplitRatios {
  double train = 0.78;
  double val = 0.02;
  double test = 0.20;
};

struct DatasetSplits {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

// Seeded shuffle, then test = floor(N*r_test), val = floor(N*r_val) and the
// remainder is train.
inline DatasetSplits split_dataset(std::vector<std::string> ids, SplitRatios r,
                                   std::uint64_t seed) {
  if (ids.size() < 3) throw InvalidArgument("split_dataset: need at least 3 items");
  if (r.train < 0 || r.val < 0 || r.test < 0 ||
      std::abs(r.train + r.val + r.test - 1.0) > 1e-9) {
    throw InvalidArgument("split_dataset: ratios must be non-negative and sum to 1");
  }
  const double n = static_cast<double>(ids.size());
  // The small slack absorbs binary rounding (e.g. 10 * 0.1) before flooring.
  auto n_test = static_cast<std::size_t>(std::floor(n * r.test + 1e-9));
  auto n_val = static_cast<std::size_t>(std::floor(n * r.val + 1e-9));
  Rng rng(seed);
  rng.shuffle(ids.begin(), ids.end());
  DatasetSplits s;
  s.test.assign(ids.begin(), ids.begin() + n_test);
  s.val.assign(ids.begin() + n_test, ids.begin() + n_test + n_val);
  s.train.assign(ids.begin() + n_test + n_val, ids.end());
  return s;
}

}  // namespace clothparse
