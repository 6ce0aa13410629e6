#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "clothparse/crf/params.hpp"
#include "clothparse/error.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

// Probabilities are floored here before taking -log so that a zero softmax
// output yields a large finite cost instead of infinity.
inline constexpr double kUnaryFloor = 1e-10;

struct KernelValues {
  double appearance;  // g1
  double smoothness;  // g2
};

// A fully-connected CRF over one image: unary costs -log P plus Potts
// pairwise terms weighted by w1*g1 + w2*g2.
class CrfInstance {
 public:
  CrfInstance(ProbMaps unary, RgbImage image, CrfParams params)
      : unary_(std::move(unary)), image_(std::move(image)), params_(params) {
    params_.validate();
    if (unary_.width() != image_.width() || unary_.height() != image_.height()) {
      throw InvalidArgument("crf: unary and image dimensions differ");
    }
    if (unary_.channels() == 0) throw InvalidArgument("crf: no labels");
    cost_ = Tensor3<double>(unary_.channels(), unary_.height(), unary_.width());
    for (std::size_t i = 0; i < unary_.size(); ++i) {
      cost_.values()[i] = -std::log(std::max(unary_.values()[i], kUnaryFloor));
    }
    inv_pos_ = 1.0 / (params_.sigma_position * params_.sigma_position);
    inv_col_ = 1.0 / (params_.sigma_color * params_.sigma_color);
    inv_smooth_ = 1.0 / (params_.sigma_smooth * params_.sigma_smooth);
  }

  const ProbMaps& unary() const { return unary_; }
  const RgbImage& image() const { return image_; }
  const CrfParams& params() const { return params_; }
  std::size_t labels() const { return unary_.channels(); }
  std::size_t pixels() const { return unary_.pixels(); }
  std::size_t width() const { return unary_.width(); }
  std::size_t height() const { return unary_.height(); }

  // phi_i(l) = -log max(P_i(l), floor)
  double unary_cost(std::size_t label, std::size_t pixel) const { return cost_.at(label, pixel); }

  KernelValues kernels(std::size_t i, std::size_t j) const {
    const std::size_t w = width();
    const double dx = double(i % w) - double(j % w);
    const double dy = double(i / w) - double(j / w);
    const double d2 = dx * dx + dy * dy;
    const Rgb a = image_[i], b = image_[j];
    const double dr = double(a.r) - b.r, dg = double(a.g) - b.g, db = double(a.b) - b.b;
    const double c2 = dr * dr + dg * dg + db * db;
    return {std::exp(-d2 * inv_pos_ - c2 * inv_col_), std::exp(-d2 * inv_smooth_)};
  }

  // Potts penalty w1*g1 + w2*g2 paid when i and j take different labels.
  double pairwise(std::size_t i, std::size_t j) const {
    if (params_.w1 == 0.0 && params_.w2 == 0.0) return 0.0;
    auto k = kernels(i, j);
    return params_.w1 * k.appearance + params_.w2 * k.smoothness;
  }

 private:
  ProbMaps unary_;
  RgbImage image_;
  CrfParams params_;
  Tensor3<double> cost_;
  double inv_pos_ = 0, inv_col_ = 0, inv_smooth_ = 0;
};

// (g1, g2) between flat pixel indices i and j of an image.
inline KernelValues kernel_eval(std::size_t i, std::size_t j, const RgbImage& image,
                                const CrfParams& params) {
  const std::size_t w = image.width();
  const double dx = double(i % w) - double(j % w);
  const double dy = double(i / w) - double(j / w);
  const double d2 = dx * dx + dy * dy;
  const Rgb a = image[i], b = image[j];
  const double dr = double(a.r) - b.r, dg = double(a.g) - b.g, db = double(a.b) - b.b;
  const double c2 = dr * dr + dg * dg + db * db;
  const double sp = params.sigma_position, sc = params.sigma_color, ss = params.sigma_smooth;
  return {std::exp(-d2 / (sp * sp) - c2 / (sc * sc)), std::exp(-d2 / (ss * ss))};
}

}  // namespace clothparse
