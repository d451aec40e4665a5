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
#include <optional>
#include <utility>
#include <variant>

#include "gpabf/error.hpp"
#include "gpabf/image.hpp"
#include "gpabf/kernels.hpp"
#include "gpabf/order_select.hpp"
#include "gpabf/spatial_conv.hpp"

namespace gpabf {

/// Below this range scale the intermediate images can overflow a double at
/// the orders required for T = 128; callers must opt in explicitly.
inline constexpr double kMinSigmaR = 10.0;

struct FixedOrder {
  int n;
};

struct TargetAccuracy {
  double delta;  // worst-case per-pixel error, intensity units
};

struct FilterParams {
  double sigma_r = 30.0;
  std::variant<FixedOrder, TargetAccuracy> order = FixedOrder{10};
  RangeSpec range = RangeSpec::eight_bit();
  bool allow_small_sigma_r = false;
  OrderOptions order_options{};

  void validate() const {
    if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
      throw ParameterError("sigma_r must be positive");
    }
    if (sigma_r < kMinSigmaR && !allow_small_sigma_r) {
      throw ParameterError("sigma_r below 10 requires the small-sigma override");
    }
    range.validate();
    if (const auto* fixed = std::get_if<FixedOrder>(&order)) {
      if (fixed->n < 1) throw ParameterError("order N must be >= 1");
    } else {
      const double delta = std::get<TargetAccuracy>(order).delta;
      if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ParameterError("delta must be positive");
      }
    }
  }
};

/// The six images the filter works in.
struct GpaWorkspace {
  Image F;     // exp(-h^2 / 2 sigma_r^2) H^n
  Image G;     // H^n / n!
  Image H;     // h / sigma_r
  Image Fbar;  // F * w
  Image P;     // numerator accumulator
  Image Q;     // denominator accumulator

  GpaWorkspace(int width, int height)
      : F(width, height), G(width, height), H(width, height),
        Fbar(width, height), P(width, height), Q(width, height) {}
};

/// Fast bilateral filter with a Gaussian range kernel replaced by its
/// order-N Gaussian-polynomial approximation.
///
/// With h = f - t_c and H = h / sigma_r, the output is
///
///   f_GPA = sigma_r P / Q + t_c,
///   P = sum_{n<N} H^n/n! (w * e^{-H^2/2} H^{n+1}),
///   Q = sum_{n<N} H^n/n! (w * e^{-H^2/2} H^n),
///
/// evaluated with exactly N + 1 spatial filterings and recursively updated
/// powers and factorials. An engine is bound to one kernel and image size and
/// may be reused; it is not safe to share between threads.
class GpaEngine {
 public:
  GpaEngine(const SpatialKernel& kernel, int width, int height)
      : filter_(kernel, width, height), ws_(width, height) {}

  const GpaWorkspace& workspace() const noexcept { return ws_; }

  /// Spatial filterings performed by the most recent run().
  std::size_t spatial_filterings() const noexcept { return last_filterings_; }

  Image run(const Image& img, double sigma_r, int order, const RangeSpec& range) {
    if (!img.same_shape(ws_.F)) throw ParameterError("GpaEngine: image shape mismatch");
    if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
      throw ParameterError("GpaEngine: sigma_r must be positive");
    }
    if (order < 1) throw ParameterError("GpaEngine: order must be >= 1");
    check_range(img, range);

    const std::size_t start_calls = filter_.calls();
    const auto f = img.samples();
    auto F = ws_.F.samples();
    auto G = ws_.G.samples();
    auto H = ws_.H.samples();
    auto Fbar = ws_.Fbar.samples();
    auto P = ws_.P.samples();
    auto Q = ws_.Q.samples();
    const std::size_t count = f.size();
    const double inv_two_s2 = 1.0 / (2.0 * sigma_r * sigma_r);

    for (std::size_t i = 0; i < count; ++i) {
      const double h = f[i] - range.center;
      F[i] = std::exp(-h * h * inv_two_s2);
      G[i] = 1.0;
      P[i] = 0.0;
      Q[i] = 0.0;
      H[i] = h / sigma_r;
    }
    filter_.apply(ws_.F, ws_.Fbar);

    for (int n = 1; n <= order; ++n) {
      for (std::size_t i = 0; i < count; ++i) {
        Q[i] += G[i] * Fbar[i];
        F[i] *= H[i];
      }
      filter_.apply(ws_.F, ws_.Fbar);
      for (std::size_t i = 0; i < count; ++i) {
        P[i] += G[i] * Fbar[i];
        G[i] = H[i] * G[i] / n;
      }
    }
    last_filterings_ = filter_.calls() - start_calls;

    Image out(img.width(), img.height());
    auto o = out.samples();
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::isfinite(P[i]) || !std::isfinite(Q[i])) {
        throw NumericRangeError(
            "GPA accumulators overflowed; lower the order or raise sigma_r");
      }
      // Only reachable with a forced order far below the required one.
      o[i] = std::abs(Q[i]) < 1e-30 ? f[i] : sigma_r * (P[i] / Q[i]) + range.center;
    }
    return out;
  }

 private:
  SpatialFilter filter_;
  GpaWorkspace ws_;
  std::size_t last_filterings_ = 0;
};

struct GpaResult {
  Image image;
  int order;
  std::optional<OrderEstimate> estimate;  // set when the order came from delta
  std::size_t spatial_filterings;
};

/// Resolves the order to run with: either the fixed N or the estimate for
/// epsilon = w0 delta / (2T + delta).
inline std::pair<int, std::optional<OrderEstimate>> resolve_order(
    const FilterParams& params, const SpatialKernel& spatial) {
  params.validate();
  if (const auto* fixed = std::get_if<FixedOrder>(&params.order)) {
    return {fixed->n, std::nullopt};
  }
  const double delta = std::get<TargetAccuracy>(params.order).delta;
  const double T = params.range.half_range;
  const double eps = epsilon_from_delta(delta, spatial.w0(), T);
  OrderEstimate est = estimate_order(params.sigma_r, eps, T, params.order_options);
  return {est.N0, std::move(est)};
}

inline GpaResult gpa_filter(const Image& img, const SpatialKernel& spatial,
                            const FilterParams& params) {
  auto [order, estimate] = resolve_order(params, spatial);
  GpaEngine engine(spatial, img.width(), img.height());
  Image out = engine.run(img, params.sigma_r, order, params.range);
  return {std::move(out), order, std::move(estimate), engine.spatial_filterings()};
}

inline Image gpa_filter(const Image& img, const SpatialKernel& spatial, double sigma_r,
                        int order, const RangeSpec& range = RangeSpec::eight_bit()) {
  FilterParams params;
  params.sigma_r = sigma_r;
  params.order = FixedOrder{order};
  params.range = range;
  return gpa_filter(img, spatial, params).image;
}

/// Filters with the smallest order whose guarantee keeps every output pixel
/// within +-delta of bilateral_exact (same kernel, same boundary handling).
inline std::pair<Image, OrderEstimate> gpa_filter_auto(
    const Image& img, const SpatialKernel& spatial, double sigma_r, double delta,
    const RangeSpec& range = RangeSpec::eight_bit()) {
  FilterParams params;
  params.sigma_r = sigma_r;
  params.order = TargetAccuracy{delta};
  params.range = range;
  GpaResult result = gpa_filter(img, spatial, params);
  return {std::move(result.image), std::move(*result.estimate)};
}

}  // namespace gpabf
