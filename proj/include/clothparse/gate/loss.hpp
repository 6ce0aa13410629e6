#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "clothparse/gate/features.hpp"
#include "clothparse/gate/forward.hpp"
#include "clothparse/gate/model.hpp"
#include "clothparse/presence.hpp"

namespace clothparse {

// Which objective (and therefore which parameters) a training step sees.
enum class LossMode {
  ungated,       // softmax CE on the raw trunk scores; trunk gradients only
  encoder_only,  // sigmoid CE of the gate against presence; encoder gradients only
  joint,         // softmax CE on gated scores + lambda * sigmoid CE; all gradients
};

// Names of the parameter blocks a loss mode trains.
inline bool block_trained(const std::string& name, LossMode mode) {
  const bool trunk = name.rfind("trunk.", 0) == 0;
  switch (mode) {
    case LossMode::ungated: return trunk;
    case LossMode::encoder_only: return !trunk;
    case LossMode::joint: return true;
  }
  return false;
}

struct Sample {
  FeatureMap features;
  LabelMask gt;
  PresenceVector presence;
};

inline Sample make_sample(const RgbImage& image, const LabelMask& gt, std::size_t labels) {
  if (image.width() != gt.width() || image.height() != gt.height()) {
    throw InvalidArgument("image and mask dimensions differ");
  }
  return {extract_features(image), gt, presence_vector(gt, labels)};
}

struct LossValue {
  double total = 0.0;
  double segmentation = 0.0;  // mean per-pixel softmax CE
  double encoder = 0.0;       // mean per-label sigmoid CE
};

// log(1 + exp(z)) - y z, evaluated without overflow.
inline double sigmoid_cross_entropy(double logit, double target) {
  return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

// Loss of one sample, accumulating scale * dLoss/dparams into grad when
// non-null. grad must have the model's shapes.
inline LossValue loss_and_gradient(const Sample& s, const ToyModelParams& m, double lambda,
                                   LossMode mode, ToyModelParams* grad = nullptr,
                                   double scale = 1.0) {
  const std::size_t labels = m.labels(), d = m.feature_dim(), n = s.features.pixels();
  if (s.gt.size() != n) throw InvalidArgument("loss: mask and features differ in size");
  if (s.presence.size() != labels) throw InvalidArgument("loss: presence length mismatch");
  LossValue out;

  const bool use_enc = mode != LossMode::ungated;
  const bool use_seg = mode != LossMode::encoder_only;
  EncoderOutput enc;
  std::vector<double> gate(labels, 1.0);
  if (use_enc) {
    enc = encoder_forward(s.features, m);
    if (mode == LossMode::joint) gate = enc.gate.values;
  }

  // dLoss/dgate via the segmentation term (joint mode only).
  std::vector<double> dgate(labels, 0.0);
  if (use_seg) {
    Tensor3<double> f = trunk_scores(s.features, m);
    std::vector<double> prob(labels);
    const double inv_n = 1.0 / double(n);
    for (std::size_t p = 0; p < n; ++p) {
      double mx = -INFINITY;
      for (std::size_t l = 0; l < labels; ++l) mx = std::max(mx, gate[l] * f.at(l, p));
      double z = 0.0;
      for (std::size_t l = 0; l < labels; ++l) z += prob[l] = std::exp(gate[l] * f.at(l, p) - mx);
      const std::size_t y = s.gt[p];
      if (y >= labels) throw InvalidArgument("loss: mask label out of range");
      out.segmentation += (mx + std::log(z) - gate[y] * f.at(y, p)) * inv_n;
      if (!grad) continue;
      for (std::size_t l = 0; l < labels; ++l) {
        const double dg_score = (prob[l] / z - (l == y ? 1.0 : 0.0)) * inv_n;  // dL/dG
        const double df = dg_score * gate[l] * scale;
        grad->trunk_b.data[l] += df;
        for (std::size_t k = 0; k < d; ++k) grad->trunk_w(l, k) += df * s.features.at(k, p);
        dgate[l] += dg_score * f.at(l, p);
      }
    }
  }

  if (use_enc) {
    const double weight = mode == LossMode::joint ? lambda : 1.0;
    for (std::size_t l = 0; l < labels; ++l) {
      out.encoder += sigmoid_cross_entropy(enc.logits[l], s.presence[l]) / double(labels);
    }
    if (grad) {
      std::vector<double> dz(labels);
      for (std::size_t l = 0; l < labels; ++l) {
        const double g = enc.gate[l];
        dz[l] = weight * (g - s.presence[l]) / double(labels);
        if (mode == LossMode::joint) dz[l] += dgate[l] * g * (1.0 - g);
        dz[l] *= scale;
      }
      std::vector<double> dhidden(kEncoderHidden, 0.0);
      for (std::size_t l = 0; l < labels; ++l) {
        grad->fc2_b.data[l] += dz[l];
        for (std::size_t u = 0; u < kEncoderHidden; ++u) {
          grad->fc2_w(l, u) += dz[l] * enc.hidden[u];
          dhidden[u] += dz[l] * m.fc2_w(l, u);
        }
      }
      for (std::size_t u = 0; u < kEncoderHidden; ++u) {
        if (enc.pre[u] <= 0) continue;
        grad->fc1_b.data[u] += dhidden[u];
        for (std::size_t k = 0; k < d; ++k) grad->fc1_w(u, k) += dhidden[u] * enc.pooled[k];
      }
    }
    out.total += weight * out.encoder;
  }
  out.total += out.segmentation;
  return out;
}

// Mean loss over samples, with the matching mean gradient when requested.
inline LossValue dataset_loss(const std::vector<Sample>& samples, const ToyModelParams& m,
                              double lambda, LossMode mode, ToyModelParams* grad = nullptr) {
  if (samples.empty()) throw InvalidArgument("loss: no samples");
  if (grad) {
    *grad = ToyModelParams(m.labels(), m.feature_dim());
  }
  LossValue sum;
  const double scale = 1.0 / double(samples.size());
  for (const auto& s : samples) {
    LossValue v = loss_and_gradient(s, m, lambda, mode, grad, scale);
    sum.total += v.total * scale;
    sum.segmentation += v.segmentation * scale;
    sum.encoder += v.encoder * scale;
  }
  return sum;
}

// Joint objective on one image: segmentation CE on the gated scores plus
// lambda times the encoder's presence CE.
inline LossValue total_loss(const RgbImage& image, const LabelMask& gt,
                            const ToyModelParams& m, double lambda = 1.0) {
  return loss_and_gradient(make_sample(image, gt, m.labels()), m, lambda, LossMode::joint);
}

}  // namespace clothparse
