#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <png.h>

#include "clothparse/error.hpp"
#include "clothparse/palette.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

namespace png_detail {

struct ImageGuard {
  png_image img;
  ImageGuard() {
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
  }
  ~ImageGuard() { png_image_free(&img); }
  ImageGuard(const ImageGuard&) = delete;
  ImageGuard& operator=(const ImageGuard&) = delete;
};

inline void begin_file(ImageGuard& g, const std::string& path) {
  if (!png_image_begin_read_from_file(&g.img, path.c_str())) {
    throw IoError("png " + path + ": " + g.img.message);
  }
}

inline void begin_memory(ImageGuard& g, std::span<const std::uint8_t> bytes) {
  if (!png_image_begin_read_from_memory(&g.img, bytes.data(), bytes.size())) {
    throw FormatError(std::string("png: ") + g.img.message);
  }
}

inline std::vector<std::uint8_t> finish(ImageGuard& g, png_uint_32 format) {
  g.img.format = format;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(g.img));
  if (!png_image_finish_read(&g.img, nullptr, buf.data(), 0, nullptr)) {
    throw FormatError(std::string("png: ") + g.img.message);
  }
  return buf;
}

inline LabelMask decode_mask(ImageGuard& g) {
  // Only true 8-bit grayscale is accepted; colour or 16-bit files would be
  // silently converted by libpng, which would corrupt label indices.
  if (g.img.format != PNG_FORMAT_GRAY) {
    throw FormatError("mask png must be 8-bit single-channel");
  }
  std::size_t w = g.img.width, h = g.img.height;
  auto buf = finish(g, PNG_FORMAT_GRAY);
  return LabelMask(w, h, std::move(buf));
}

inline RgbImage decode_rgb(ImageGuard& g) {
  std::size_t w = g.img.width, h = g.img.height;
  auto buf = finish(g, PNG_FORMAT_RGB);
  RgbImage out(w, h);
  for (std::size_t p = 0; p < w * h; ++p) out[p] = {buf[3 * p], buf[3 * p + 1], buf[3 * p + 2]};
  return out;
}

inline void check_labels(const LabelMask& mask, std::size_t label_count) {
  for (Label v : mask.values()) {
    if (v >= label_count) {
      throw FormatError("mask value " + std::to_string(v) + " is not a label (L=" +
                        std::to_string(label_count) + ")");
    }
  }
}

inline std::vector<std::uint8_t> encode(const void* pixels, std::size_t w, std::size_t h,
                                        png_uint_32 format) {
  ImageGuard g;
  g.img.width = static_cast<png_uint_32>(w);
  g.img.height = static_cast<png_uint_32>(h);
  g.img.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&g.img, nullptr, &size, 0, pixels, 0, nullptr)) {
    throw IoError(std::string("png encode: ") + g.img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&g.img, out.data(), &size, 0, pixels, 0, nullptr)) {
    throw IoError(std::string("png encode: ") + g.img.message);
  }
  out.resize(size);
  return out;
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write " + path);
  bool ok = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size();
  ok = (std::fclose(f) == 0) && ok;
  if (!ok) throw IoError("short write to " + path);
}

}  // namespace png_detail

// Masks are 8-bit grayscale PNGs whose pixel value is the label index.
inline LabelMask load_mask(const std::string& path, std::size_t label_count) {
  png_detail::ImageGuard g;
  png_detail::begin_file(g, path);
  LabelMask m = png_detail::decode_mask(g);
  png_detail::check_labels(m, label_count);
  return m;
}

inline LabelMask decode_mask_png(std::span<const std::uint8_t> bytes, std::size_t label_count) {
  png_detail::ImageGuard g;
  png_detail::begin_memory(g, bytes);
  LabelMask m = png_detail::decode_mask(g);
  png_detail::check_labels(m, label_count);
  return m;
}

inline std::vector<std::uint8_t> encode_mask_png(const LabelMask& mask) {
  if (mask.empty()) throw InvalidArgument("cannot encode an empty mask");
  return png_detail::encode(mask.values().data(), mask.width(), mask.height(), PNG_FORMAT_GRAY);
}

inline void save_mask(const LabelMask& mask, const std::string& path,
                      std::size_t label_count = 256) {
  png_detail::check_labels(mask, label_count);
  png_detail::write_file(path, encode_mask_png(mask));
}

inline RgbImage load_rgb(const std::string& path) {
  png_detail::ImageGuard g;
  png_detail::begin_file(g, path);
  return png_detail::decode_rgb(g);
}

inline RgbImage decode_rgb_png(std::span<const std::uint8_t> bytes) {
  png_detail::ImageGuard g;
  png_detail::begin_memory(g, bytes);
  return png_detail::decode_rgb(g);
}

inline std::vector<std::uint8_t> encode_rgb_png(const RgbImage& img) {
  if (img.empty()) throw InvalidArgument("cannot encode an empty image");
  return png_detail::encode(img.values().data(), img.width(), img.height(), PNG_FORMAT_RGB);
}

inline void save_rgb(const RgbImage& img, const std::string& path) {
  png_detail::write_file(path, encode_rgb_png(img));
}

// Reads only the header. Returns {width, height}.
inline std::pair<std::size_t, std::size_t> png_dimensions(const std::string& path) {
  png_detail::ImageGuard g;
  png_detail::begin_file(g, path);
  return {g.img.width, g.img.height};
}

}  // namespace clothparse
