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

#include "gpabf/error.hpp"
#include "gpabf/image.hpp"
#include "gpabf/kernels.hpp"
#include "gpabf/parallel.hpp"
#include "gpabf/spatial_conv.hpp"

namespace gpabf {

/// Brute-force bilateral filter with a Gaussian range kernel:
///
///   out(i) = sum_j w(j) g(f(i-j) - f(i)) f(i-j) / sum_j w(j) g(f(i-j) - f(i))
///
/// O(W^2) per pixel, replicate boundary, no shortcuts. The denominator is at
/// least w(0) because the j = 0 term has range weight 1.
inline Image bilateral_exact(const Image& img, const SpatialKernel& spatial,
                             double sigma_r) {
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
    throw ParameterError("bilateral_exact: sigma_r must be positive");
  }
  const int W = spatial.half_width();
  detail::check_window(img.width(), img.height(), W);
  const double inv_two_s2 = 1.0 / (2.0 * sigma_r * sigma_r);

  Image out(img.width(), img.height());
  const std::size_t work = static_cast<std::size_t>(img.width()) * spatial.weights().size();
  detail::parallel_rows(img.height(), work, [&](int y) {
    for (int x = 0; x < img.width(); ++x) {
      const double center = img(x, y);
      double num = 0.0;
      double den = 0.0;
      for (int dy = -W; dy <= W; ++dy) {
        for (int dx = -W; dx <= W; ++dx) {
          const double v = img.clamped(x - dx, y - dy);
          const double d = v - center;
          const double weight = spatial.weight(dx, dy) * std::exp(-d * d * inv_two_s2);
          num += weight * v;
          den += weight;
        }
      }
      out(x, y) = num / den;
    }
  });
  return out;
}

}  // namespace gpabf
