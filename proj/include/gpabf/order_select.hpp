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
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "gpabf/error.hpp"

namespace gpabf {

enum class OrderMethod {
  fixed_large_sigma,
  chebyshev,
  chernoff_exhaustive,
  lambertw_series,
  lambertw_newton,
  approx_formula,
  yang_formula,
};

inline std::string_view to_string(OrderMethod m) noexcept {
  switch (m) {
    case OrderMethod::fixed_large_sigma: return "fixed_large_sigma";
    case OrderMethod::chebyshev: return "chebyshev";
    case OrderMethod::chernoff_exhaustive: return "chernoff_exhaustive";
    case OrderMethod::lambertw_series: return "lambertw_series";
    case OrderMethod::lambertw_newton: return "lambertw_newton";
    case OrderMethod::approx_formula: return "approx_formula";
    case OrderMethod::yang_formula: return "yang_formula";
  }
  return "unknown";
}

/// A selected approximation order together with how it was obtained.
struct OrderEstimate {
  int N0 = 1;
  OrderMethod method = OrderMethod::fixed_large_sigma;
  double epsilon = 0.0;  // kernel-error budget
  double lambda = 0.0;   // T^2 / sigma_r^2
  std::optional<double> p;             // 1 + ln(lambda)
  std::optional<double> q;             // -lambda - ln(epsilon)
  std::optional<double> lambert_arg;   // argument handed to the W0 series
  std::optional<double> lambert_value; // series value of W0
  /// x_0 = q / W0 followed by every Newton iterate.
  std::vector<double> newton_trace;
};

/// Sum_{n >= N} e^{-lambda} lambda^n / n!, i.e. P(X >= N) for X ~ Poisson(lambda).
///
/// Terms are generated by multiplicative recursion from a log-space anchor so
/// neither e^{-lambda} nor lambda^n / n! can underflow on their own. When
/// N > lambda the tail is summed directly (no cancellation); otherwise the
/// complement 1 - sum_{n<N} is used. The result is clamped to [0, 1].
inline double poisson_tail(int N, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("poisson_tail: lambda must be positive");
  }
  if (N <= 0) return 1.0;
  const double log_lambda = std::log(lambda);
  const auto log_pmf = [&](int n) {
    return -lambda + n * log_lambda - std::lgamma(n + 1.0);
  };

  if (N > lambda) {
    double term = std::exp(log_pmf(N));
    double sum = 0.0;
    for (int n = N;; ++n) {
      sum += term;
      term *= lambda / (n + 1);
      if (term <= sum * 1e-18 || term == 0.0) break;
    }
    return std::clamp(sum, 0.0, 1.0);
  }

  // Head sum, accumulated from the largest term (n = N-1) downwards.
  double term = std::exp(log_pmf(N - 1));
  double head = 0.0;
  for (int n = N - 1; n >= 0; --n) {
    head += term;
    term *= n / lambda;
    if (term <= head * 1e-18) break;
  }
  return std::clamp(1.0 - head, 0.0, 1.0);
}

namespace detail {

inline void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1)");
  }
}

inline void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("lambda must be positive");
  }
}

inline int ceil_to_int(double x) { return static_cast<int>(std::ceil(x)); }

}  // namespace detail

/// ceil(lambda + sqrt(lambda / epsilon)), from the Chebyshev tail bound.
inline OrderEstimate chebyshev_order(double lambda, double epsilon) {
  detail::check_lambda(lambda);
  detail::check_epsilon(epsilon);
  OrderEstimate est;
  est.method = OrderMethod::chebyshev;
  est.epsilon = epsilon;
  est.lambda = lambda;
  est.N0 = detail::ceil_to_int(lambda + std::sqrt(lambda / epsilon));
  return est;
}

/// Logarithm of the Chernoff tail bound e^{-lambda} (e lambda)^N / N^N.
inline double chernoff_log_bound(double N, double lambda) {
  return -lambda + N * (1.0 + std::log(lambda) - std::log(N));
}

/// Smallest integer N > lambda whose Chernoff bound is <= epsilon, by linear
/// scan. Slow for small sigma_r but has no approximation in it.
inline OrderEstimate chernoff_order_exhaustive(double lambda, double epsilon) {
  detail::check_lambda(lambda);
  detail::check_epsilon(epsilon);
  const double log_eps = std::log(epsilon);
  int N = static_cast<int>(std::floor(lambda)) + 1;
  while (chernoff_log_bound(N, lambda) > log_eps) ++N;

  OrderEstimate est;
  est.method = OrderMethod::chernoff_exhaustive;
  est.epsilon = epsilon;
  est.lambda = lambda;
  est.p = 1.0 + std::log(lambda);
  est.q = -lambda - log_eps;
  est.N0 = N;
  return est;
}

/// Four-term Taylor series of the principal Lambert W branch around 0.
inline double lambert_w0_series(double t) {
  return t * (1.0 + t * (-1.0 + t * (1.5 - (8.0 / 3.0) * t)));
}

/// When Newton refinement of the Lambert-W estimate is applied.
enum class NewtonMode {
  /// Three iterations, only when sigma_r < 30 (the literal algorithm box).
  below_30,
  /// Three iterations for every sigma_r below the large-sigma threshold.
  always,
  /// Iterate until |dx| < 0.25 (at most 10 iterations), every sigma_r.
  converge,
};

struct OrderOptions {
  NewtonMode newton = NewtonMode::always;
  double large_sigma_threshold = 70.0;
  int large_sigma_order = 10;
};

/// Approximation order N0 whose kernel error is within epsilon.
///
/// For sigma_r >= 70 a fixed order of 10 is returned. Otherwise the smallest
/// integer root of x ln x - p x - q = 0 above lambda is estimated from the
/// Lambert-W closed form N0 = q / W0(q e^{-p}), with W0 taken from its
/// four-term series and then polished by Newton steps
///
///   x <- x - (x ln x - p x - q) / (ln x + 1 - p).
///
/// If the series initializer is unusable (W0 <= 0 with q > 0, or x0 not above
/// lambda when Newton is to run) the exhaustive Chernoff scan is used and the
/// method is reported as chernoff_exhaustive.
inline OrderEstimate estimate_order(double sigma_r, double epsilon, double T,
                                    const OrderOptions& options = {}) {
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
    throw ParameterError("estimate_order: sigma_r must be positive");
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ParameterError("estimate_order: T must be positive");
  }
  detail::check_epsilon(epsilon);

  OrderEstimate est;
  est.epsilon = epsilon;
  est.lambda = (T * T) / (sigma_r * sigma_r);

  if (sigma_r >= options.large_sigma_threshold) {
    est.method = OrderMethod::fixed_large_sigma;
    est.N0 = options.large_sigma_order;
    return est;
  }

  const double lambda = est.lambda;
  const double p = 1.0 + std::log(lambda);
  const double q = -lambda - std::log(epsilon);
  const double t = q / (std::numbers::e * lambda);
  const double w0 = lambert_w0_series(t);
  est.p = p;
  est.q = q;
  est.lambert_arg = t;
  est.lambert_value = w0;

  const auto fallback = [&] {
    OrderEstimate exact = chernoff_order_exhaustive(lambda, epsilon);
    exact.lambert_arg = est.lambert_arg;
    exact.lambert_value = est.lambert_value;
    exact.newton_trace = std::move(est.newton_trace);
    return exact;
  };

  if (q > 0.0 && !(w0 > 0.0)) return fallback();
  double x = q / w0;
  if (!std::isfinite(x) || !(x > 0.0)) return fallback();
  est.newton_trace.push_back(x);

  const bool refine = options.newton != NewtonMode::below_30 || sigma_r < 30.0;
  if (refine) {
    if (!(x > lambda)) return fallback();
    const int max_iter = options.newton == NewtonMode::converge ? 10 : 3;
    for (int k = 0; k < max_iter; ++k) {
      const double step = (x * std::log(x) - p * x - q) / (std::log(x) + 1.0 - p);
      x -= step;
      est.newton_trace.push_back(x);
      if (!std::isfinite(x) || !(x > lambda)) return fallback();
      if (options.newton == NewtonMode::converge && std::abs(step) < 0.25) break;
    }
    est.method = OrderMethod::lambertw_newton;
  } else {
    est.method = OrderMethod::lambertw_series;
  }

  est.N0 = detail::ceil_to_int(x);
  if (est.N0 <= lambda) est.N0 = static_cast<int>(std::floor(lambda)) + 1;
  return est;
}

/// ceil(x_0): the order the series initializer alone would give, when the
/// Lambert-W branch was taken.
inline std::optional<int> series_only_order(const OrderEstimate& est) {
  if (est.newton_trace.empty()) return std::nullopt;
  return detail::ceil_to_int(est.newton_trace.front());
}

/// Kernel-error budget that guarantees a filtering error within +-delta:
/// epsilon = w0 delta / (2T + delta).
inline double epsilon_from_delta(double delta, double w0, double T) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ParameterError("epsilon_from_delta: delta must be positive");
  }
  if (!(w0 > 0.0 && w0 <= 1.0)) {
    throw ParameterError("epsilon_from_delta: w0 must lie in (0, 1]");
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ParameterError("epsilon_from_delta: T must be positive");
  }
  return w0 * delta / (2.0 * T + delta);
}

/// Closed-form estimate N0 ~ 1.72 (T/sigma_r)^2 + ln(2T / (w0 delta)),
/// rounded to the nearest integer.
inline OrderEstimate order_approx(double sigma_r, double delta, double w0, double T) {
  if (!(sigma_r > 0.0) || !(delta > 0.0) || !(T > 0.0)) {
    throw ParameterError("order_approx: parameters must be positive");
  }
  if (!(w0 > 0.0 && w0 <= 1.0)) {
    throw ParameterError("order_approx: w0 must lie in (0, 1]");
  }
  OrderEstimate est;
  est.method = OrderMethod::approx_formula;
  est.lambda = (T * T) / (sigma_r * sigma_r);
  est.epsilon = epsilon_from_delta(delta, w0, T);
  const double value = 1.72 * est.lambda + std::log(2.0 * T / (w0 * delta));
  est.N0 = std::max(1, static_cast<int>(std::round(value)));
  return est;
}

/// Order estimate for the principal-image method of Yang et al.,
/// N0 ~ 1.14e5 / (sqrt(delta) sigma_r^2), rounded to the nearest integer.
/// Reported for comparison only.
inline OrderEstimate yang_order(double sigma_r, double delta) {
  if (!(sigma_r > 0.0) || !(delta > 0.0)) {
    throw ParameterError("yang_order: parameters must be positive");
  }
  OrderEstimate est;
  est.method = OrderMethod::yang_formula;
  const double value = 1.14e5 / (std::sqrt(delta) * sigma_r * sigma_r);
  est.N0 = std::max(1, static_cast<int>(std::round(value)));
  return est;
}

}  // namespace gpabf
