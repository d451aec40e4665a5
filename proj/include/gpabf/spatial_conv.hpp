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

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "gpabf/error.hpp"
#include "gpabf/image.hpp"
#include "gpabf/kernels.hpp"
#include "gpabf/parallel.hpp"

// Linear spatial filtering with clamp-to-edge (replicate) boundaries.
//
// Every path in the library, fast or brute force, extends the image the same
// way, so the exact and approximate bilateral filters see identical windows.

namespace gpabf {

namespace detail {

inline void check_window(int width, int height, int half_width) {
  if (half_width < 1) throw ParameterError("spatial filter: W must be >= 1");
  if (half_width >= std::max(width, height)) {
    throw ParameterError("spatial filter: window larger than image");
  }
}

// Replicate-pads src by `pad` samples on both sides into dst.
inline void pad_row(std::span<const double> src, int pad, std::span<double> dst) {
  const int n = static_cast<int>(src.size());
  for (int k = 0; k < n + 2 * pad; ++k) {
    dst[static_cast<std::size_t>(k)] =
        src[static_cast<std::size_t>(std::clamp(k - pad, 0, n - 1))];
  }
}

// 1-D box average through a prefix sum over the padded row.
inline void box_row(std::span<const double> src, int half_width,
                    std::span<double> prefix, std::span<double> padded,
                    double* dst, std::size_t dst_stride) {
  const int n = static_cast<int>(src.size());
  const int side = 2 * half_width + 1;
  pad_row(src, half_width, padded);
  prefix[0] = 0.0;
  for (int k = 0; k < n + 2 * half_width; ++k) {
    prefix[static_cast<std::size_t>(k) + 1] =
        prefix[static_cast<std::size_t>(k)] + padded[static_cast<std::size_t>(k)];
  }
  const double scale = 1.0 / side;
  for (int x = 0; x < n; ++x) {
    const double sum = prefix[static_cast<std::size_t>(x + side)] -
                       prefix[static_cast<std::size_t>(x)];
    dst[static_cast<std::size_t>(x) * dst_stride] = sum * scale;
  }
}

// 1-D weighted sum with a symmetric profile of length 2W+1.
inline void weighted_row(std::span<const double> src, std::span<const double> profile,
                         std::span<double> padded, double* dst,
                         std::size_t dst_stride) {
  const int n = static_cast<int>(src.size());
  const int half_width = static_cast<int>(profile.size() / 2);
  pad_row(src, half_width, padded);
  for (int x = 0; x < n; ++x) {
    double acc = 0.0;
    const double* window = padded.data() + x;
    for (std::size_t k = 0; k < profile.size(); ++k) acc += profile[k] * window[k];
    dst[static_cast<std::size_t>(x) * dst_stride] = acc;
  }
}

}  // namespace detail

/// Separable spatial filter bound to one kernel and one image size.
///
/// Holds its own scratch so repeated apply() calls do not allocate. Box
/// kernels run in O(1) per pixel (prefix sums along each axis); Gaussian
/// kernels run the truncated 1-D profile along rows, then columns.
class SpatialFilter {
 public:
  SpatialFilter(const SpatialKernel& kernel, int width, int height)
      : kernel_(kernel), transposed_(height, width) {
    detail::check_window(width, height, kernel.half_width());
    reserve_buffers();
  }

  const SpatialKernel& kernel() const noexcept { return kernel_; }

  /// Number of apply() calls so far.
  std::size_t calls() const noexcept { return calls_; }

  /// out = in * w. `out` must have the shape of `in` and must not alias it.
  void apply(const Image& in, Image& out) {
    if (!in.same_shape(out) || in.width() != transposed_.height() ||
        in.height() != transposed_.width()) {
      throw ParameterError("SpatialFilter::apply: image shape mismatch");
    }
    ++calls_;
    reserve_buffers();
    pass(in, transposed_);
    pass(transposed_, out);
  }

 private:
  // One pair of row buffers per worker chunk; only grows if the thread limit
  // is raised after construction.
  void reserve_buffers() {
    const std::size_t chunks = static_cast<std::size_t>(std::max(1, thread_limit()));
    if (padded_.size() >= chunks) return;
    const std::size_t longest = static_cast<std::size_t>(
        std::max(transposed_.width(), transposed_.height()) + 2 * kernel_.half_width());
    padded_.resize(chunks, std::vector<double>(longest));
    prefix_.resize(chunks, std::vector<double>(longest + 1));
  }

  // Filters every row of src and writes the result transposed into dst.
  void pass(const Image& src, Image& dst) {
    const int rows = src.height();
    const std::size_t stride = static_cast<std::size_t>(dst.width());
    double* base = dst.samples().data();
    const std::size_t work =
        static_cast<std::size_t>(src.width()) *
        (kernel_.kind() == SpatialKind::box ? 4 : static_cast<std::size_t>(kernel_.side()));
    detail::parallel_chunks(rows, work, [&](int chunk, int begin, int end) {
      auto& padded = padded_[static_cast<std::size_t>(chunk)];
      auto& prefix = prefix_[static_cast<std::size_t>(chunk)];
      for (int y = begin; y < end; ++y) {
        double* column = base + y;
        if (kernel_.kind() == SpatialKind::box) {
          detail::box_row(src.row(y), kernel_.half_width(), prefix, padded, column, stride);
        } else {
          detail::weighted_row(src.row(y), kernel_.axis_weights(), padded, column, stride);
        }
      }
    });
  }

  SpatialKernel kernel_;
  Image transposed_;
  std::vector<std::vector<double>> padded_;
  std::vector<std::vector<double>> prefix_;
  std::size_t calls_ = 0;
};

/// Separable fast path for either kernel kind.
inline Image spatial_filter(const Image& img, const SpatialKernel& kernel) {
  SpatialFilter filter(kernel, img.width(), img.height());
  Image out(img.width(), img.height());
  filter.apply(img, out);
  return out;
}

/// Box average over [-W, W]^2 in O(1) operations per pixel.
inline Image box_filter(const Image& img, int half_width) {
  detail::check_window(img.width(), img.height(), half_width);
  return spatial_filter(img, SpatialKernel::box(half_width));
}

/// Truncated Gaussian (W = ceil(3 sigma_s)) applied separably.
inline Image gaussian_filter(const Image& img, double sigma_s) {
  const SpatialKernel kernel = SpatialKernel::gaussian(sigma_s);
  detail::check_window(img.width(), img.height(), kernel.half_width());
  return spatial_filter(img, kernel);
}

/// Literal 2-D convolution sum; the reference every fast path is tested against.
inline Image convolve_direct(const Image& img, const SpatialKernel& kernel) {
  const int W = kernel.half_width();
  detail::check_window(img.width(), img.height(), W);
  Image out(img.width(), img.height());
  const std::size_t work = static_cast<std::size_t>(img.width()) * kernel.weights().size();
  detail::parallel_rows(img.height(), work, [&](int y) {
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int dy = -W; dy <= W; ++dy) {
        for (int dx = -W; dx <= W; ++dx) {
          acc += kernel.weight(dx, dy) * img.clamped(x - dx, y - dy);
        }
      }
      out(x, y) = acc;
    }
  });
  return out;
}

}  // namespace gpabf
