#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "clothparse/error.hpp"
#include "clothparse/palette.hpp"
#include "clothparse/png_io.hpp"

namespace clothparse {

class NotFound : public Error {
 public:
  using Error::Error;
};

// Request body is well-formed transport-wise but not an acceptable mask.
class InvalidMask : public Error {
 public:
  using Error::Error;
};

struct ImageInfo {
  std::string id;
  std::size_t width = 0;
  std::size_t height = 0;
  bool has_mask = false;
};

enum class MissingMaskPolicy {
  not_found,   // GET of a mask never written is a 404
  background,  // ... or an all-background mask of the image's size
};

// Project directory of <id>.png images and <id>_mask.png label masks. Mask
// writes go to a temporary file in the same directory and are renamed into
// place, so readers see either the old or the new file, never a partial one.
class AnnotationStore {
 public:
  AnnotationStore(std::filesystem::path dir, Palette palette,
                  MissingMaskPolicy policy = MissingMaskPolicy::not_found)
      : dir_(std::move(dir)), palette_(std::move(palette)), policy_(policy) {
    if (!std::filesystem::is_directory(dir_)) {
      throw IoError("project directory " + dir_.string() + " is not readable");
    }
  }

  const Palette& palette() const { return palette_; }
  const std::filesystem::path& dir() const { return dir_; }

  static bool valid_id(const std::string& id) {
    if (id.empty() || id.size() > 200 || id == "." || id == "..") return false;
    for (char c : id) {
      const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '_' || c == '-' || c == '.';
      if (!ok) return false;
    }
    return true;
  }

  static bool is_mask_file(const std::string& stem) {
    return stem.size() > 5 && stem.compare(stem.size() - 5, 5, "_mask") == 0;
  }

  // Lexicographic by id.
  std::vector<ImageInfo> list_images() const {
    std::vector<ImageInfo> out;
    std::error_code ec;
    std::filesystem::directory_iterator it(dir_, ec);
    if (ec) throw IoError("cannot list " + dir_.string() + ": " + ec.message());
    std::vector<std::string> ids;
    for (const auto& e : it) {
      if (!e.is_regular_file() || e.path().extension() != ".png") continue;
      std::string stem = e.path().stem().string();
      if (is_mask_file(stem) || !valid_id(stem)) continue;
      ids.push_back(stem);
    }
    std::sort(ids.begin(), ids.end());
    for (auto& id : ids) {
      auto [w, h] = png_dimensions(image_path(id).string());
      out.push_back({id, w, h, std::filesystem::exists(mask_path(id))});
    }
    return out;
  }

  std::vector<std::uint8_t> image_bytes(const std::string& id) const {
    return read_file(require_image(id));
  }

  // Raw PNG bytes of the stored mask, or of an all-background mask when the
  // policy allows it.
  std::vector<std::uint8_t> mask_bytes(const std::string& id) const {
    auto img = require_image(id);
    auto path = mask_path(id);
    if (std::filesystem::exists(path)) return read_file(path);
    if (policy_ == MissingMaskPolicy::background) {
      auto [w, h] = png_dimensions(img.string());
      return encode_mask_png(LabelMask(w, h, 0));
    }
    throw NotFound("no mask for " + id);
  }

  LabelMask get_mask(const std::string& id) const {
    auto bytes = mask_bytes(id);
    return decode_mask_png(bytes, palette_.size());
  }

  void put_mask(const std::string& id, std::span<const std::uint8_t> png) {
    auto img = require_image(id);
    LabelMask mask;
    try {
      mask = decode_mask_png(png, palette_.size());
    } catch (const Error& ex) {
      throw InvalidMask(ex.what());
    }
    auto [w, h] = png_dimensions(img.string());
    if (mask.width() != w || mask.height() != h) {
      throw InvalidMask("mask is " + std::to_string(mask.width()) + "x" +
                        std::to_string(mask.height()) + ", image is " + std::to_string(w) + "x" +
                        std::to_string(h));
    }
    std::lock_guard<std::mutex> lock(lock_for(id));
    auto target = mask_path(id);
    auto tmp = target;
    tmp += ".tmp" + std::to_string(counter_.fetch_add(1));
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw IoError("cannot write " + tmp.string());
      out.write(reinterpret_cast<const char*>(png.data()), std::streamsize(png.size()));
      out.close();
      if (!out) {
        std::filesystem::remove(tmp);
        throw IoError("short write to " + tmp.string());
      }
    }
    std::filesystem::rename(tmp, target);
  }

  void put_mask(const std::string& id, const LabelMask& mask) {
    auto bytes = encode_mask_png(mask);
    put_mask(id, std::span<const std::uint8_t>(bytes));
  }

 private:
  std::filesystem::path image_path(const std::string& id) const { return dir_ / (id + ".png"); }
  std::filesystem::path mask_path(const std::string& id) const { return dir_ / (id + "_mask.png"); }

  std::filesystem::path require_image(const std::string& id) const {
    if (!valid_id(id) || is_mask_file(id)) throw NotFound("unknown image " + id);
    auto p = image_path(id);
    if (!std::filesystem::is_regular_file(p)) throw NotFound("unknown image " + id);
    return p;
  }

  static std::vector<std::uint8_t> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  std::mutex& lock_for(const std::string& id) {
    std::lock_guard<std::mutex> g(locks_mutex_);
    auto& m = locks_[id];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  std::filesystem::path dir_;
  Palette palette_;
  MissingMaskPolicy policy_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace clothparse
