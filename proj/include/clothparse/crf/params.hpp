#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "clothparse/error.hpp"

namespace clothparse {

// Weights and bandwidths of the two Gaussian pairwise kernels. Positions are
// in pixels, colours in 0..255 RGB units.
struct CrfParams {
  double w1 = 10.0;
  double w2 = 10.0;
  double sigma_position = 30.0;
  double sigma_color = 10.0;
  double sigma_smooth = 3.0;

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(w1) || !finite(w2) || w1 < 0 || w2 < 0) {
      throw InvalidArgument("crf params: kernel weights must be finite and >= 0");
    }
    if (!finite(sigma_position) || !finite(sigma_color) || !finite(sigma_smooth) ||
        sigma_position <= 0 || sigma_color <= 0 || sigma_smooth <= 0) {
      throw InvalidArgument("crf params: bandwidths must be finite and > 0");
    }
  }

  nlohmann::json to_json() const {
    return {{"w1", w1},
            {"w2", w2},
            {"sigma_position", sigma_position},
            {"sigma_color", sigma_color},
            {"sigma_smooth", sigma_smooth}};
  }

  static CrfParams from_json(const nlohmann::json& j) {
    CrfParams p;
    try {
      p.w1 = j.at("w1").get<double>();
      p.w2 = j.at("w2").get<double>();
      p.sigma_position = j.at("sigma_position").get<double>();
      p.sigma_color = j.at("sigma_color").get<double>();
      p.sigma_smooth = j.at("sigma_smooth").get<double>();
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(std::string("crf params: ") + ex.what());
    }
    p.validate();
    return p;
  }

  friend bool operator==(const CrfParams&, const CrfParams&) = default;
};

inline CrfParams load_crf_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& ex) {
    throw FormatError(path + ": " + ex.what());
  }
  return CrfParams::from_json(j);
}

inline void save_crf_params(const CrfParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << p.to_json().dump(2) << "\n";
}

}  // namespace clothparse
