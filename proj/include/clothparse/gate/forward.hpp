#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "clothparse/error.hpp"
#include "clothparse/gate/features.hpp"
#include "clothparse/gate/model.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

// Per-label image-level gate g_i. Encoder outputs lie strictly inside (0, 1);
// hand-written gates may use the closed interval.
struct GateVector {
  std::vector<double> values;

  GateVector() = default;
  explicit GateVector(std::vector<double> v) : values(std::move(v)) {
    for (double g : values)
      if (!(g >= 0.0 && g <= 1.0)) throw InvalidArgument("gate values must lie in [0, 1]");
  }
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  nlohmann::json to_json() const { return {{"gate", values}}; }
  static GateVector from_json(const nlohmann::json& j) {
    try {
      return GateVector(j.at("gate").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(std::string("gate json: ") + ex.what());
    }
  }
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline void check_features(const FeatureMap& f, const ToyModelParams& m) {
  if (f.channels() != m.feature_dim()) throw InvalidArgument("feature dimension mismatch");
  if (f.pixels() == 0) throw InvalidArgument("empty feature map");
}

// F = W feat + b at every pixel, in double precision.
inline Tensor3<double> trunk_scores(const FeatureMap& f, const ToyModelParams& m) {
  check_features(f, m);
  const std::size_t labels = m.labels(), d = m.feature_dim(), n = f.pixels();
  Tensor3<double> out(labels, f.height(), f.width());
  for (std::size_t l = 0; l < labels; ++l) {
    auto dst = out.channel(l);
    std::fill(dst.begin(), dst.end(), m.trunk_b.data[l]);
    for (std::size_t k = 0; k < d; ++k) {
      const double wk = m.trunk_w(l, k);
      auto src = f.channel(k);
      for (std::size_t p = 0; p < n; ++p) dst[p] += wk * src[p];
    }
  }
  return out;
}

inline HeatmapStack trunk_forward(const FeatureMap& f, const ToyModelParams& m) {
  return trunk_scores(f, m).cast<float>();
}

struct EncoderOutput {
  std::vector<double> pooled;     // D
  std::vector<double> pre;        // 256, before ReLU
  std::vector<double> hidden;     // 256, after ReLU (the outfit descriptor)
  std::vector<double> logits;     // L
  GateVector gate;                // sigmoid(logits)
};

inline EncoderOutput encoder_forward(const FeatureMap& f, const ToyModelParams& m) {
  check_features(f, m);
  const std::size_t d = m.feature_dim(), labels = m.labels(), n = f.pixels();
  EncoderOutput out;
  out.pooled.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double s = 0.0;
    for (double v : f.channel(k)) s += v;
    out.pooled[k] = s / double(n);
  }
  out.pre.assign(kEncoderHidden, 0.0);
  out.hidden.assign(kEncoderHidden, 0.0);
  for (std::size_t u = 0; u < kEncoderHidden; ++u) {
    double s = m.fc1_b.data[u];
    for (std::size_t k = 0; k < d; ++k) s += m.fc1_w(u, k) * out.pooled[k];
    out.pre[u] = s;
    out.hidden[u] = s > 0 ? s : 0.0;
  }
  out.logits.assign(labels, 0.0);
  std::vector<double> g(labels);
  for (std::size_t l = 0; l < labels; ++l) {
    double s = m.fc2_b.data[l];
    for (std::size_t u = 0; u < kEncoderHidden; ++u) s += m.fc2_w(l, u) * out.hidden[u];
    out.logits[l] = s;
    g[l] = sigmoid(s);
  }
  out.gate = GateVector(std::move(g));
  return out;
}

// G_i = g_i * F_i, channel by channel.
inline HeatmapStack gate_heatmaps(const HeatmapStack& f, const GateVector& g) {
  if (f.channels() != g.size()) throw InvalidArgument("gate length differs from label count");
  HeatmapStack out = f;
  for (std::size_t l = 0; l < f.channels(); ++l) {
    for (float& v : out.channel(l)) v = static_cast<float>(g[l] * double(v));
  }
  return out;
}

}  // namespace clothparse
