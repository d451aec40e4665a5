// Copyright 2026 The gpabf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gpabf/error.hpp"

namespace gpabf {

/// A width x height grid of real intensities stored row-major.
///
/// Samples are always finite; 8-bit data is promoted to double on load.
class Image {
 public:
  Image(int width, int height, double fill = 0.0)
      : width_(width), height_(height) {
    check_dims(width, height);
    samples_.assign(static_cast<std::size_t>(width) * height, fill);
    if (!std::isfinite(fill)) throw ParameterError("Image: fill value is not finite");
  }

  Image(int width, int height, std::vector<double> samples)
      : width_(width), height_(height), samples_(std::move(samples)) {
    check_dims(width, height);
    if (samples_.size() != static_cast<std::size_t>(width) * height) {
      throw ParameterError("Image: sample count does not match width*height");
    }
    for (double v : samples_) {
      if (!std::isfinite(v)) throw ParameterError("Image: non-finite sample");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }

  double operator()(int x, int y) const noexcept {
    return samples_[index(x, y)];
  }
  double& operator()(int x, int y) noexcept { return samples_[index(x, y)]; }

  /// Clamp-to-edge read; the project-wide boundary policy.
  double clamped(int x, int y) const noexcept {
    x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
    y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
    return samples_[index(x, y)];
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> samples() noexcept { return samples_; }

  std::span<const double> row(int y) const noexcept {
    return std::span<const double>(samples_).subspan(
        static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_));
  }
  std::span<double> row(int y) noexcept {
    return std::span<double>(samples_).subspan(
        static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_));
  }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
      throw ParameterError("Image: width and height must be positive");
    }
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<double> samples_;
};

/// Declared dynamic range [center - half_range, center + half_range].
struct RangeSpec {
  double half_range = 128.0;
  double center = 128.0;

  /// 8-bit data: [0, 255] maps into [-128, 127].
  static constexpr RangeSpec eight_bit() noexcept { return {128.0, 128.0}; }

  void validate() const {
    if (!(half_range > 0.0) || !std::isfinite(half_range)) {
      throw ParameterError("RangeSpec: half_range must be positive");
    }
    if (!std::isfinite(center)) {
      throw ParameterError("RangeSpec: center must be finite");
    }
  }

  bool contains(double v) const noexcept {
    return v >= center - half_range && v <= center + half_range;
  }
};

/// Throws RangeViolation naming the first sample outside `spec`.
inline void check_range(const Image& img, const RangeSpec& spec) {
  spec.validate();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = img(x, y);
      if (!spec.contains(v)) {
        std::ostringstream msg;
        msg << "sample " << v << " at pixel (" << x << ", " << y
            << ") lies outside [" << spec.center - spec.half_range << ", "
            << spec.center + spec.half_range << "]";
        throw RangeViolation(x, y, v, msg.str());
      }
    }
  }
}

/// Shifts intensities so that the declared range is centred on zero.
inline Image center(const Image& img, const RangeSpec& spec) {
  check_range(img, spec);
  Image out = img;
  for (double& v : out.samples()) v -= spec.center;
  return out;
}

inline Image uncenter(const Image& img, const RangeSpec& spec) {
  Image out = img;
  for (double& v : out.samples()) v += spec.center;
  return out;
}

}  // namespace gpabf
