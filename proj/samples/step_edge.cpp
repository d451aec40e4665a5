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

// Smooths a noisy step edge with the fast filter at a requested accuracy and
// checks the result against the exact bilateral filter.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <random>

#include "gpabf.hpp"

int main() {
  constexpr int kSize = 96;
  std::mt19937 rng(7);
  std::normal_distribution<double> noise(0.0, 12.0);

  gpabf::Image img(kSize, kSize);
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) {
      const double base = x < kSize / 2 ? 60.0 : 190.0;
      img(x, y) = std::clamp(std::round(base + noise(rng)), 0.0, 255.0);
    }
  }

  const auto kernel = gpabf::SpatialKernel::gaussian(3.0);
  const double sigma_r = 40.0;
  const double delta = 0.5;

  const auto [fast, estimate] = gpabf::gpa_filter_auto(img, kernel, sigma_r, delta);
  const gpabf::Image exact = gpabf::bilateral_exact(img, kernel, sigma_r);

  std::printf("order N0 = %d (%s), epsilon = %.3g\n", estimate.N0,
              std::string(gpabf::to_string(estimate.method)).c_str(), estimate.epsilon);
  std::printf("max |fast - exact| = %.3g (target %.3g)\n", gpabf::linf_error(fast, exact),
              delta);
  std::printf("edge profile (row %d):", kSize / 2);
  for (int x = kSize / 2 - 4; x < kSize / 2 + 4; ++x) std::printf(" %.1f", fast(x, kSize / 2));
  std::printf("\n");
  return gpabf::linf_error(fast, exact) <= delta ? 0 : 1;
}
