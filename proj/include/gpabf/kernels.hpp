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
#include <string_view>
#include <vector>

#include "gpabf/error.hpp"

namespace gpabf {

/// Gaussian range kernel exp(-t^2 / (2 sigma_r^2)).
inline double range_kernel(double t, double sigma_r) {
  if (!(sigma_r > 0.0)) throw ParameterError("range_kernel: sigma_r must be positive");
  return std::exp(-(t * t) / (2.0 * sigma_r * sigma_r));
}

struct RangeKernelParams {
  double sigma_r;
  int order;  // number of Taylor terms kept

  void validate() const {
    if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
      throw ParameterError("RangeKernelParams: sigma_r must be positive");
    }
    if (order < 1) throw ParameterError("RangeKernelParams: order must be >= 1");
  }
};

/// Order-N Gaussian-polynomial approximation of g(t - tau):
///
///   exp(-(t^2 + tau^2) / 2 sigma_r^2) * sum_{n<N} (tau t / sigma_r^2)^n / n!
///
/// The Taylor terms are built by the recursion term_n = term_{n-1} * x / n,
/// which never forms n! explicitly.
inline double gauss_poly(double t, double tau, const RangeKernelParams& params) {
  params.validate();
  const double s2 = params.sigma_r * params.sigma_r;
  const double x = tau * t / s2;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < params.order; ++n) {
    term *= x / n;
    sum += term;
  }
  return std::exp(-(t * t + tau * tau) / (2.0 * s2)) * sum;
}

enum class SpatialKind { box, gaussian };

inline std::string_view to_string(SpatialKind kind) noexcept {
  return kind == SpatialKind::box ? "box" : "gaussian";
}

/// Normalized, nonnegative, symmetric weights on the square window [-W, W]^2.
///
/// Both supported kernels are separable: weight(dx, dy) is the product of the
/// normalized 1-D profile at dx and dy. The 2-D table is built by direct
/// summation and is what the brute-force paths use; the separable fast paths
/// use axis_weights().
class SpatialKernel {
 public:
  static SpatialKernel box(int half_width) {
    if (half_width < 1) throw ParameterError("box kernel: W must be >= 1");
    SpatialKernel k(SpatialKind::box, half_width, 0.0);
    const int side = 2 * half_width + 1;
    const double w = 1.0 / (static_cast<double>(side) * side);
    k.weights_.assign(static_cast<std::size_t>(side) * side, w);
    k.axis_.assign(static_cast<std::size_t>(side), 1.0 / side);
    k.w0_ = w;
    return k;
  }

  /// Truncated at W = ceil(3 sigma_s).
  static SpatialKernel gaussian(double sigma_s) {
    if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) {
      throw ParameterError("gaussian kernel: sigma_s must be positive");
    }
    const int half_width = static_cast<int>(std::ceil(3.0 * sigma_s));
    SpatialKernel k(SpatialKind::gaussian, half_width, sigma_s);
    const int side = 2 * half_width + 1;
    const double denom = 2.0 * sigma_s * sigma_s;

    k.weights_.resize(static_cast<std::size_t>(side) * side);
    double total = 0.0;
    for (int dy = -half_width; dy <= half_width; ++dy) {
      for (int dx = -half_width; dx <= half_width; ++dx) {
        const double w = std::exp(-(dx * dx + dy * dy) / denom);
        k.weights_[k.index(dx, dy)] = w;
        total += w;
      }
    }
    for (double& w : k.weights_) w /= total;
    k.w0_ = k.weights_[k.index(0, 0)];

    k.axis_.resize(static_cast<std::size_t>(side));
    double axis_total = 0.0;
    for (int d = -half_width; d <= half_width; ++d) {
      k.axis_[static_cast<std::size_t>(d + half_width)] = std::exp(-(d * d) / denom);
      axis_total += k.axis_[static_cast<std::size_t>(d + half_width)];
    }
    for (double& w : k.axis_) w /= axis_total;
    return k;
  }

  SpatialKind kind() const noexcept { return kind_; }
  int half_width() const noexcept { return half_width_; }
  int side() const noexcept { return 2 * half_width_ + 1; }
  /// Zero for box kernels.
  double sigma_s() const noexcept { return sigma_s_; }
  /// Weight at the origin; also the largest weight.
  double w0() const noexcept { return w0_; }

  double weight(int dx, int dy) const noexcept { return weights_[index(dx, dy)]; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// Normalized 1-D factor indexed by offset + W.
  std::span<const double> axis_weights() const noexcept { return axis_; }

 private:
  SpatialKernel(SpatialKind kind, int half_width, double sigma_s)
      : kind_(kind), half_width_(half_width), sigma_s_(sigma_s) {}

  std::size_t index(int dx, int dy) const noexcept {
    return static_cast<std::size_t>(dy + half_width_) * side() +
           static_cast<std::size_t>(dx + half_width_);
  }

  SpatialKind kind_;
  int half_width_;
  double sigma_s_;
  double w0_ = 0.0;
  std::vector<double> weights_;
  std::vector<double> axis_;
};

/// `param` is W for box kernels (must be an integer >= 1) and sigma_s for
/// Gaussian kernels.
inline SpatialKernel make_spatial_kernel(SpatialKind kind, double param) {
  if (kind == SpatialKind::box) {
    if (param < 1.0 || param != std::floor(param) || param > 1e6) {
      throw ParameterError("box kernel: W must be an integer >= 1");
    }
    return SpatialKernel::box(static_cast<int>(param));
  }
  return SpatialKernel::gaussian(param);
}

}  // namespace gpabf
