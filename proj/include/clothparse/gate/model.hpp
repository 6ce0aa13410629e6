#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "clothparse/error.hpp"
#include "clothparse/random.hpp"

namespace clothparse {

inline constexpr std::size_t kEncoderHidden = 256;

// Row-major matrix/vector parameter block.
struct ParamTensor {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  ParamTensor() = default;
  ParamTensor(std::string n, std::size_t r, std::size_t c, double fill = 0.0)
      : name(std::move(n)), rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  friend bool operator==(const ParamTensor&, const ParamTensor&) = default;
};

// Desk-scale gated segmentation model: a per-pixel linear trunk producing
// label scores, and the outfit encoder (mean pool -> FC 256 -> ReLU -> FC L
// -> sigmoid). The same struct doubles as the gradient container.
struct ToyModelParams {
  ParamTensor trunk_w;  // L x D
  ParamTensor trunk_b;  // L x 1
  ParamTensor fc1_w;    // 256 x D
  ParamTensor fc1_b;    // 256 x 1
  ParamTensor fc2_w;    // L x 256
  ParamTensor fc2_b;    // L x 1

  ToyModelParams() = default;
  ToyModelParams(std::size_t labels, std::size_t feature_dim)
      : trunk_w("trunk.weight", labels, feature_dim),
        trunk_b("trunk.bias", labels, 1),
        fc1_w("encoder.fc1.weight", kEncoderHidden, feature_dim),
        fc1_b("encoder.fc1.bias", kEncoderHidden, 1),
        fc2_w("encoder.fc2.weight", labels, kEncoderHidden),
        fc2_b("encoder.fc2.bias", labels, 1) {}

  std::size_t labels() const { return trunk_w.rows; }
  std::size_t feature_dim() const { return trunk_w.cols; }

  std::vector<ParamTensor*> trunk_blocks() { return {&trunk_w, &trunk_b}; }
  std::vector<ParamTensor*> encoder_blocks() { return {&fc1_w, &fc1_b, &fc2_w, &fc2_b}; }
  std::vector<ParamTensor*> blocks() {
    return {&trunk_w, &trunk_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
  }
  std::vector<const ParamTensor*> blocks() const {
    return {&trunk_w, &trunk_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
  }

  void validate() const {
    const std::size_t l = labels(), d = feature_dim();
    auto shape = [](const ParamTensor& t, std::size_t r, std::size_t c) {
      return t.rows == r && t.cols == c && t.data.size() == r * c;
    };
    if (!shape(trunk_w, l, d) || !shape(trunk_b, l, 1) || !shape(fc1_w, kEncoderHidden, d) ||
        !shape(fc1_b, kEncoderHidden, 1) || !shape(fc2_w, l, kEncoderHidden) ||
        !shape(fc2_b, l, 1)) {
      throw InvalidArgument("model: inconsistent parameter shapes");
    }
    for (const auto* b : blocks())
      for (double v : b->data)
        if (!std::isfinite(v)) throw InvalidArgument("model: non-finite parameter in " + b->name);
  }

  friend bool operator==(const ToyModelParams&, const ToyModelParams&) = default;
};

// Gaussian initialisation scaled by fan-in; biases start at zero.
inline ToyModelParams init_model(std::size_t labels, std::size_t feature_dim,
                                 std::uint64_t seed) {
  ToyModelParams m(labels, feature_dim);
  Rng rng(seed);
  auto fill = [&](ParamTensor& t, double stddev) {
    for (double& v : t.data) v = rng.normal(0.0, stddev);
  };
  fill(m.trunk_w, 0.01);
  fill(m.fc1_w, 1.0 / std::sqrt(double(feature_dim)));
  fill(m.fc2_w, 1.0 / std::sqrt(double(kEncoderHidden)));
  return m;
}

}  // namespace clothparse
