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
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "gpabf/error.hpp"
#include "gpabf/image.hpp"
#include "gpabf/kernels.hpp"
#include "gpabf/order_select.hpp"

namespace gpabf {

/// Differences between two filtered images plus whatever bounds and timings
/// were computed alongside them.
struct ErrorReport {
  double linf = 0.0;
  double linf_db = -std::numeric_limits<double>::infinity();
  double mse_db = -std::numeric_limits<double>::infinity();
  std::optional<double> kernel_error_sup;
  std::optional<double> kernel_bound;
  std::optional<double> accuracy_bound;
  std::map<std::string, double> runtime_ms;
};

namespace detail {

inline void check_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ParameterError("images have different dimensions");
}

}  // namespace detail

/// max_i |a(i) - b(i)|
inline double linf_error(const Image& a, const Image& b) {
  detail::check_same_shape(a, b);
  double worst = 0.0;
  const auto x = a.samples();
  const auto y = b.samples();
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

inline double mean_squared_error(const Image& a, const Image& b) {
  detail::check_same_shape(a, b);
  double acc = 0.0;
  const auto x = a.samples();
  const auto y = b.samples();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

/// 10 log10(MSE); -inf when the images are identical.
inline double mse_db(const Image& a, const Image& b) {
  const double mse = mean_squared_error(a, b);
  return mse == 0.0 ? -std::numeric_limits<double>::infinity() : 10.0 * std::log10(mse);
}

/// 20 log10(x); -inf at zero.
inline double amplitude_db(double x) {
  return x == 0.0 ? -std::numeric_limits<double>::infinity() : 20.0 * std::log10(x);
}

inline ErrorReport compare_images(const Image& reference, const Image& approx) {
  ErrorReport report;
  report.linf = linf_error(reference, approx);
  report.linf_db = amplitude_db(report.linf);
  report.mse_db = mse_db(reference, approx);
  return report;
}

/// psi_N(s) = exp(-s/sigma_r^2) sum_{n>=N} (s/sigma_r^2)^n / n!, the Poisson
/// tail at rate s / sigma_r^2. Non-decreasing in s.
inline double psi_eval(double s, int N, double sigma_r) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ParameterError("psi_eval: s must be >= 0");
  if (!(sigma_r > 0.0)) throw ParameterError("psi_eval: sigma_r must be positive");
  if (s == 0.0) return N <= 0 ? 1.0 : 0.0;
  return poisson_tail(N, s / (sigma_r * sigma_r));
}

/// |E_N(t, tau)| = |g(t - tau) - gauss_poly(t, tau)|, evaluated through the
/// tail form exp(-(t^2 + tau^2)/2 sigma_r^2) sum_{n>=N} x^n / n! with
/// x = t tau / sigma_r^2, which avoids subtracting two nearly equal numbers.
/// For x > 0 this factors as g(t - tau) times a Poisson tail at rate x.
inline double kernel_error(double t, double tau, int N, double sigma_r) {
  if (N < 1) throw ParameterError("kernel_error: N must be >= 1");
  if (!(sigma_r > 0.0)) throw ParameterError("kernel_error: sigma_r must be positive");
  const double s2 = sigma_r * sigma_r;
  const double x = t * tau / s2;
  if (x == 0.0) return 0.0;
  if (x > 0.0) return range_kernel(t - tau, sigma_r) * poisson_tail(N, x);

  // Alternating tail. Terms shrink once n > |x|.
  double term = 1.0;
  for (int n = 1; n <= N; ++n) term *= x / n;
  double sum = 0.0;
  for (int n = N;; ++n) {
    sum += term;
    term *= x / (n + 1);
    if (n + 1 > -x && std::abs(term) <= std::abs(sum) * 1e-18) break;
    if (term == 0.0) break;
  }
  return std::exp(-(t * t + tau * tau) / (2.0 * s2)) * std::abs(sum);
}

namespace detail {

template <typename ErrorFn>
double grid_sup(double T, ErrorFn&& error) {
  if (!(T > 0.0)) throw ParameterError("kernel error: T must be positive");
  const int steps = static_cast<int>(std::floor(2.0 * T));
  double worst = 0.0;
  for (int a = 0; a <= steps; ++a) {
    const double tau = -T + a;
    for (int b = 0; b <= steps; ++b) {
      worst = std::max(worst, error(-T + b, tau));
    }
  }
  return worst;
}

}  // namespace detail

/// max |E_N(t, tau)| over the integer grid t, tau in {-T, -T+1, ..., T}.
inline double kernel_error_sup(int N, double sigma_r, double T) {
  return detail::grid_sup(T, [&](double t, double tau) {
    return kernel_error(t, tau, N, sigma_r);
  });
}

/// Same grid maximum, by literally subtracting the Gaussian-polynomial from
/// the range kernel. Loses ~1e-16 absolute to cancellation.
inline double kernel_error_sup_direct(int N, double sigma_r, double T) {
  const RangeKernelParams params{sigma_r, N};
  params.validate();
  return detail::grid_sup(T, [&](double t, double tau) {
    return std::abs(range_kernel(t - tau, sigma_r) - gauss_poly(t, tau, params));
  });
}

/// Worst-case filtering error 2 T e / (w0 - e) for a kernel error e.
inline double accuracy_bound(double kernel_err, double w0, double T) {
  if (!(kernel_err >= 0.0) || !(w0 > 0.0) || !(T > 0.0)) {
    throw ParameterError("accuracy_bound: invalid arguments");
  }
  if (kernel_err >= w0) {
    throw BoundInapplicable("accuracy_bound: kernel error is not below w(0)");
  }
  return 2.0 * T * kernel_err / (w0 - kernel_err);
}

}  // namespace gpabf
