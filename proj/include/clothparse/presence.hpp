#pragma once

#include <cstddef>
#include <vector>

#include "clothparse/error.hpp"
#include "clothparse/tensor.hpp"

namespace clothparse {

// Per-label image-level indicator. Ground truth holds exact 0/1 values;
// predictions hold confidences in [0,1].
struct PresenceVector {
  std::vector<double> values;

  PresenceVector() = default;
  explicit PresenceVector(std::size_t labels, double fill = 0.0) : values(labels, fill) {}
  explicit PresenceVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool present(std::size_t i, double threshold = 0.5) const { return values[i] >= threshold; }

  friend bool operator==(const PresenceVector&, const PresenceVector&) = default;
};

// The set of labels occurring anywhere in the mask.
inline PresenceVector presence_vector(const LabelMask& mask, std::size_t labels) {
  PresenceVector out(labels);
  for (Label v : mask.values()) {
    if (v >= labels) throw InvalidArgument("presence_vector: mask value exceeds label count");
    out.values[v] = 1.0;
  }
  return out;
}

}  // namespace clothparse
