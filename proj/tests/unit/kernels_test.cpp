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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gpabf/kernels.hpp"
#include "gpabf/order_select.hpp"

namespace gpabf {
namespace {

TEST(RangeKernel, Values) {
  EXPECT_EQ(range_kernel(0.0, 30.0), 1.0);
  EXPECT_NEAR(range_kernel(30.0, 30.0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(range_kernel(30.0, 30.0), 0.606531, 1e-6);
}

TEST(RangeKernel, EvenInT) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> t(-300.0, 300.0);
  std::uniform_real_distribution<double> s(1.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double a = t(rng);
    const double b = s(rng);
    EXPECT_EQ(range_kernel(a, b), range_kernel(-a, b));
  }
}

TEST(RangeKernel, RejectsNonPositiveSigma) {
  EXPECT_THROW((void)range_kernel(1.0, 0.0), ParameterError);
  EXPECT_THROW((void)range_kernel(1.0, -2.0), ParameterError);
}

TEST(GaussPoly, ZeroTranslationKeepsOnlyFirstTerm) {
  for (int N : {1, 2, 7, 50}) {
    for (double t : {-128.0, -3.0, 0.0, 45.0}) {
      EXPECT_NEAR(gauss_poly(t, 0.0, {30.0, N}), range_kernel(t, 30.0), 1e-16);
    }
  }
}

TEST(GaussPoly, OrderOneIsBivariateGaussian) {
  EXPECT_NEAR(gauss_poly(30, 30, {30, 1}), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(gauss_poly(30, 30, {30, 1}), 0.367879, 1e-6);
}

TEST(GaussPoly, HighOrderConvergesToRangeKernel) {
  EXPECT_NEAR(gauss_poly(30, 30, {30, 200}), range_kernel(0.0, 30.0), 1e-12);
}

TEST(GaussPoly, NoFactorialOverflowPastOrder170) {
  const double v = gauss_poly(128, 128, {10, 400});
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(GaussPoly, SymmetricInArguments) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> t(-128.0, 128.0);
  for (int i = 0; i < 300; ++i) {
    const double a = t(rng);
    const double b = t(rng);
    EXPECT_EQ(gauss_poly(a, b, {25, 30}), gauss_poly(b, a, {25, 30}));
  }
}

TEST(GaussPoly, RejectsInvalidParams) {
  EXPECT_THROW((void)gauss_poly(1, 1, {0.0, 3}), ParameterError);
  EXPECT_THROW((void)gauss_poly(1, 1, {30.0, 0}), ParameterError);
}

// On a 33 x 33 grid over [-T, T]^2 the uniform error falls once N passes
// lambda, and at the selected order it sits under the Poisson tail bound.
TEST(GaussPoly, GridErrorDecaysAndRespectsTailBound) {
  const double T = 128.0;
  const double sigma_r = 30.0;
  const double lambda = (T * T) / (sigma_r * sigma_r);
  auto grid_max = [&](int N) {
    double worst = 0.0;
    for (int a = 0; a <= 32; ++a) {
      for (int b = 0; b <= 32; ++b) {
        const double t = -T + a * (2 * T / 32);
        const double tau = -T + b * (2 * T / 32);
        worst = std::max(worst, std::abs(gauss_poly(t, tau, {sigma_r, N}) -
                                         range_kernel(t - tau, sigma_r)));
      }
    }
    return worst;
  };
  double previous = grid_max(static_cast<int>(lambda) + 1);
  for (int N = static_cast<int>(lambda) + 2; N <= 60; ++N) {
    const double current = grid_max(N);
    EXPECT_LE(current, previous + 1e-15) << "N = " << N;
    previous = current;
  }
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const int N = estimate_order(sigma_r, eps, T).N0;
    EXPECT_LE(grid_max(N), poisson_tail(N, lambda) + 1e-15) << "eps = " << eps;
  }
}

TEST(SpatialKernel, Box3x3) {
  const auto k = make_spatial_kernel(SpatialKind::box, 1);
  EXPECT_EQ(k.kind(), SpatialKind::box);
  EXPECT_EQ(k.half_width(), 1);
  ASSERT_EQ(k.weights().size(), 9u);
  for (double w : k.weights()) EXPECT_DOUBLE_EQ(w, 1.0 / 9.0);
  EXPECT_DOUBLE_EQ(k.w0(), 1.0 / 9.0);
}

TEST(SpatialKernel, GaussianSigma5) {
  const auto k = make_spatial_kernel(SpatialKind::gaussian, 5.0);
  EXPECT_EQ(k.half_width(), 15);
  EXPECT_EQ(k.side(), 31);
  // 1 / sum over the 31 x 31 window of exp(-|i|^2 / 50), evaluated offline in
  // 40-digit arithmetic.
  EXPECT_NEAR(k.w0(), 0.0063904802821230361, 1e-15);
  double total = 0.0;
  for (double w : k.weights()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(SpatialKernel, GaussianWindowRoundsUp) {
  EXPECT_EQ(SpatialKernel::gaussian(1.0).half_width(), 3);
  EXPECT_EQ(SpatialKernel::gaussian(1.1).half_width(), 4);
  EXPECT_EQ(SpatialKernel::gaussian(2.5).half_width(), 8);
}

TEST(SpatialKernel, RejectsBadParameters) {
  EXPECT_THROW((void)make_spatial_kernel(SpatialKind::gaussian, 0.0), ParameterError);
  EXPECT_THROW((void)make_spatial_kernel(SpatialKind::gaussian, -1.0), ParameterError);
  EXPECT_THROW((void)make_spatial_kernel(SpatialKind::box, 0.0), ParameterError);
  EXPECT_THROW((void)make_spatial_kernel(SpatialKind::box, 2.5), ParameterError);
}

void expect_kernel_invariants(const SpatialKernel& k) {
  const int W = k.half_width();
  double total = 0.0;
  double largest = 0.0;
  for (int dy = -W; dy <= W; ++dy) {
    for (int dx = -W; dx <= W; ++dx) {
      const double w = k.weight(dx, dy);
      EXPECT_GE(w, 0.0);
      EXPECT_EQ(w, k.weight(-dx, -dy));
      EXPECT_EQ(w, k.weight(dy, dx));
      total += w;
      largest = std::max(largest, w);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(k.w0(), k.weight(0, 0));
  EXPECT_EQ(k.w0(), largest);

  double axis_total = 0.0;
  for (double w : k.axis_weights()) axis_total += w;
  EXPECT_NEAR(axis_total, 1.0, 1e-12);
  // The 2-D table is the outer product of the 1-D profile.
  const auto axis = k.axis_weights();
  for (int dy = -W; dy <= W; ++dy) {
    for (int dx = -W; dx <= W; ++dx) {
      EXPECT_NEAR(k.weight(dx, dy), axis[dx + W] * axis[dy + W], 1e-15);
    }
  }
}

TEST(SpatialKernel, InvariantsHoldForRandomParameters) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> sigma(1.0, 10.0);
  std::uniform_int_distribution<int> width(1, 25);
  for (int i = 0; i < 12; ++i) {
    expect_kernel_invariants(SpatialKernel::gaussian(sigma(rng)));
    const auto box = SpatialKernel::box(width(rng));
    expect_kernel_invariants(box);
    const double side = box.side();
    for (double w : box.weights()) EXPECT_DOUBLE_EQ(w, 1.0 / (side * side));
  }
}

}  // namespace
}  // namespace gpabf
