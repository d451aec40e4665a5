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
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpabf.hpp"
#include "json.hpp"

namespace gpabf::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kNumeric = 4,
};

enum class ReportFormat { json, csv };

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string output_path;
  std::string spatial = "gaussian";
  std::optional<double> sigma_s;
  std::optional<int> window_W;
  std::optional<double> sigma_r;
  std::optional<double> delta;
  std::optional<int> order_N;
  std::optional<double> epsilon;
  double half_range = 128.0;
  double center = 128.0;
  bool allow_small_sigma_r = false;
  std::string report_path;
  ReportFormat report_format = ReportFormat::json;
  std::vector<int> bench_orders{10, 60};
  std::vector<int> bench_windows{5, 20};
  int bench_order = 20;
  int repeats = 5;
};

/// Values that cannot be represented in JSON are written as strings.
inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

inline json to_json(const OrderEstimate& est) {
  json j;
  j["N0"] = est.N0;
  j["method"] = std::string(to_string(est.method));
  j["epsilon"] = number(est.epsilon);
  j["lambda"] = number(est.lambda);
  if (est.p) j["p"] = *est.p;
  if (est.q) j["q"] = *est.q;
  if (est.lambert_arg) j["w0_arg"] = *est.lambert_arg;
  if (est.lambert_value) j["w0_value"] = *est.lambert_value;
  j["newton_trace"] = est.newton_trace;
  if (auto series = series_only_order(est)) j["series_N0"] = *series;
  return j;
}

inline json to_json(const ErrorReport& r) {
  json j;
  j["errors"] = {{"linf", r.linf}, {"linf_db", number(r.linf_db)}, {"mse_db", number(r.mse_db)}};
  json bounds = json::object();
  if (r.kernel_error_sup) bounds["kernel_sup"] = *r.kernel_error_sup;
  if (r.kernel_bound) bounds["kernel_bound"] = *r.kernel_bound;
  if (r.accuracy_bound) bounds["accuracy_bound"] = *r.accuracy_bound;
  if (!bounds.empty()) j["bounds"] = bounds;
  if (!r.runtime_ms.empty()) j["runtime_ms"] = r.runtime_ms;
  return j;
}

namespace detail {

inline std::string csv_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ';';
      out += csv_value(v[i]);
    }
    return out;
  }
  return v.dump();
}

inline void flatten(const json& node, const std::string& prefix,
                    std::vector<std::pair<std::string, std::string>>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (node.is_array() && !node.empty() && node.front().is_object()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      flatten(node[i], prefix + "." + std::to_string(i), out);
    }
  } else {
    out.emplace_back(prefix, csv_value(node));
  }
}

}  // namespace detail

/// Two-line CSV: dotted key paths, then values. Arrays of scalars are joined
/// with ';'.
inline std::string to_csv(const json& report) {
  std::vector<std::pair<std::string, std::string>> cells;
  detail::flatten(report, "", cells);
  std::string header;
  std::string values;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) {
      header += ',';
      values += ',';
    }
    header += cells[i].first;
    values += cells[i].second;
  }
  return header + "\n" + values + "\n";
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

template <typename Fn>
double median_runtime_ms(int repeats, Fn&& fn) {
  std::vector<double> times;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    times.push_back(elapsed_ms(start));
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

inline SpatialKernel kernel_from(const RunConfig& cfg) {
  if (cfg.spatial == "gaussian") {
    if (!cfg.sigma_s) throw ParameterError("--spatial gaussian requires --sigma-s");
    return SpatialKernel::gaussian(*cfg.sigma_s);
  }
  if (cfg.spatial == "box") {
    if (!cfg.window_W) throw ParameterError("--spatial box requires --window");
    return SpatialKernel::box(*cfg.window_W);
  }
  throw ParameterError("--spatial must be gaussian or box");
}

inline RangeSpec range_from(const RunConfig& cfg) {
  RangeSpec range{cfg.half_range, cfg.center};
  range.validate();
  return range;
}

inline double require_sigma_r(const RunConfig& cfg) {
  if (!cfg.sigma_r) throw ParameterError("--sigma-r is required");
  return *cfg.sigma_r;
}

inline FilterParams filter_params(const RunConfig& cfg) {
  if (cfg.delta.has_value() == cfg.order_N.has_value()) {
    throw ParameterError("exactly one of --delta and --order is required");
  }
  FilterParams params;
  params.sigma_r = require_sigma_r(cfg);
  params.range = range_from(cfg);
  params.allow_small_sigma_r = cfg.allow_small_sigma_r;
  if (cfg.delta) {
    params.order = TargetAccuracy{*cfg.delta};
  } else {
    params.order = FixedOrder{*cfg.order_N};
  }
  return params;
}

inline json params_json(const RunConfig& cfg) {
  json p;
  p["command"] = cfg.command;
  if (!cfg.input_path.empty()) p["input"] = cfg.input_path;
  if (!cfg.output_path.empty()) p["output"] = cfg.output_path;
  p["spatial"] = cfg.spatial;
  if (cfg.sigma_s) p["sigma_s"] = *cfg.sigma_s;
  if (cfg.window_W) p["window"] = *cfg.window_W;
  if (cfg.sigma_r) p["sigma_r"] = *cfg.sigma_r;
  if (cfg.delta) p["delta"] = *cfg.delta;
  if (cfg.order_N) p["order"] = *cfg.order_N;
  if (cfg.epsilon) p["epsilon"] = *cfg.epsilon;
  p["half_range"] = cfg.half_range;
  p["center"] = cfg.center;
  return p;
}

inline json order_json(const GpaResult& result) {
  if (result.estimate) return to_json(*result.estimate);
  return {{"N0", result.order}, {"method", "explicit"}};
}

}  // namespace detail

inline json cmd_filter(const RunConfig& cfg) {
  const Image input = read_pgm(cfg.input_path);
  const SpatialKernel kernel = detail::kernel_from(cfg);
  const FilterParams params = detail::filter_params(cfg);

  const auto start = std::chrono::steady_clock::now();
  const GpaResult result = gpa_filter(input, kernel, params);
  const double ms = detail::elapsed_ms(start);
  write_pgm(cfg.output_path, result.image);

  json report;
  report["params"] = detail::params_json(cfg);
  report["order"] = detail::order_json(result);
  report["spatial_filterings"] = result.spatial_filterings;
  report["runtime_ms"] = {{"gpa", ms}};
  return report;
}

inline json cmd_reference(const RunConfig& cfg) {
  const Image input = read_pgm(cfg.input_path);
  const SpatialKernel kernel = detail::kernel_from(cfg);
  const double sigma_r = detail::require_sigma_r(cfg);

  const auto start = std::chrono::steady_clock::now();
  const Image out = bilateral_exact(input, kernel, sigma_r);
  const double ms = detail::elapsed_ms(start);
  write_pgm(cfg.output_path, out);

  json report;
  report["params"] = detail::params_json(cfg);
  report["runtime_ms"] = {{"reference", ms}};
  return report;
}

inline json cmd_compare(const RunConfig& cfg) {
  const Image input = read_pgm(cfg.input_path);
  const SpatialKernel kernel = detail::kernel_from(cfg);
  const FilterParams params = detail::filter_params(cfg);

  auto start = std::chrono::steady_clock::now();
  const GpaResult fast = gpa_filter(input, kernel, params);
  const double gpa_ms = detail::elapsed_ms(start);
  start = std::chrono::steady_clock::now();
  const Image exact = bilateral_exact(input, kernel, params.sigma_r);
  const double ref_ms = detail::elapsed_ms(start);
  if (!cfg.output_path.empty()) write_pgm(cfg.output_path, fast.image);

  ErrorReport errors = compare_images(exact, fast.image);
  const double T = params.range.half_range;
  errors.kernel_error_sup = kernel_error_sup(fast.order, params.sigma_r, T);
  errors.kernel_bound = poisson_tail(fast.order, (T * T) / (params.sigma_r * params.sigma_r));
  if (*errors.kernel_error_sup < kernel.w0()) {
    errors.accuracy_bound = accuracy_bound(*errors.kernel_error_sup, kernel.w0(), T);
  }
  errors.runtime_ms = {{"gpa", gpa_ms}, {"reference", ref_ms}};

  json report;
  report["params"] = detail::params_json(cfg);
  report["order"] = detail::order_json(fast);
  report["spatial_filterings"] = fast.spatial_filterings;
  report.update(to_json(errors));
  return report;
}

inline json cmd_order(const RunConfig& cfg) {
  const double sigma_r = detail::require_sigma_r(cfg);
  const double T = cfg.half_range;
  std::optional<SpatialKernel> kernel;
  double epsilon = 0.0;
  if (cfg.epsilon) {
    if (cfg.delta) throw ParameterError("--epsilon and --delta are mutually exclusive");
    epsilon = *cfg.epsilon;
  } else if (cfg.delta) {
    kernel = detail::kernel_from(cfg);
    epsilon = epsilon_from_delta(*cfg.delta, kernel->w0(), T);
  } else {
    throw ParameterError("order needs --epsilon or --delta with spatial parameters");
  }

  json orders;
  orders["algorithm1"] = to_json(estimate_order(sigma_r, epsilon, T));
  const double lambda = (T * T) / (sigma_r * sigma_r);
  orders["chebyshev"] = to_json(chebyshev_order(lambda, epsilon));
  orders["chernoff_exhaustive"] = to_json(chernoff_order_exhaustive(lambda, epsilon));
  if (cfg.delta) {
    orders["approx_formula"] = to_json(order_approx(sigma_r, *cfg.delta, kernel->w0(), T));
    orders["yang_formula"] = to_json(yang_order(sigma_r, *cfg.delta));
  }

  json report;
  report["params"] = detail::params_json(cfg);
  report["order"] = orders["algorithm1"];
  report["orders"] = orders;
  if (kernel) report["spatial_w0"] = kernel->w0();
  return report;
}

inline json cmd_kernel_error(const RunConfig& cfg) {
  const double sigma_r = detail::require_sigma_r(cfg);
  if (!cfg.order_N) throw ParameterError("kernel-error needs --order");
  const int N = *cfg.order_N;
  const double T = cfg.half_range;
  const double sup = kernel_error_sup(N, sigma_r, T);
  const double bound = poisson_tail(N, (T * T) / (sigma_r * sigma_r));

  json report;
  report["params"] = detail::params_json(cfg);
  report["bounds"] = {{"kernel_sup", sup}, {"kernel_bound", bound}, {"holds", sup <= bound}};
  return report;
}

inline json cmd_bench(const RunConfig& cfg) {
  const Image input = read_pgm(cfg.input_path);
  const double sigma_r = detail::require_sigma_r(cfg);
  const RangeSpec range = detail::range_from(cfg);

  json gpa_runs = json::array();
  const SpatialKernel kernel = detail::kernel_from(cfg);
  for (int N : cfg.bench_orders) {
    GpaEngine engine(kernel, input.width(), input.height());
    const double ms = detail::median_runtime_ms(
        cfg.repeats, [&] { (void)engine.run(input, sigma_r, N, range); });
    gpa_runs.push_back({{"N", N}, {"filterings", engine.spatial_filterings()}, {"median_ms", ms}});
  }

  json box_runs = json::array();
  for (int W : cfg.bench_windows) {
    GpaEngine engine(SpatialKernel::box(W), input.width(), input.height());
    const double ms = detail::median_runtime_ms(
        cfg.repeats, [&] { (void)engine.run(input, sigma_r, cfg.bench_order, range); });
    box_runs.push_back({{"W", W}, {"N", cfg.bench_order}, {"median_ms", ms}});
  }

  json report;
  report["params"] = detail::params_json(cfg);
  report["bench"] = {{"repeats", cfg.repeats}, {"threads", thread_limit()},
                     {"gpa", gpa_runs}, {"box", box_runs}};
  if (gpa_runs.size() >= 2) {
    report["bench"]["gpa_ratio"] =
        gpa_runs.back()["median_ms"].get<double>() / gpa_runs.front()["median_ms"].get<double>();
  }
  if (box_runs.size() >= 2) {
    report["bench"]["box_ratio"] =
        box_runs.back()["median_ms"].get<double>() / box_runs.front()["median_ms"].get<double>();
  }
  return report;
}

inline void emit_report(const RunConfig& cfg, const json& report, std::ostream& out) {
  const std::string text =
      cfg.report_format == ReportFormat::csv ? to_csv(report) : report.dump(2) + "\n";
  if (cfg.report_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.report_path);
  if (!file || !(file << text)) throw IoError("cannot write report " + cfg.report_path);
}

/// Parses argv, runs one command and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Fast bilateral filtering with a Gaussian-polynomial range kernel"};
  app.require_subcommand(1);

  const std::map<std::string, ReportFormat> formats{{"json", ReportFormat::json},
                                                    {"csv", ReportFormat::csv}};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--sigma-r", cfg.sigma_r, "Range kernel scale (intensity units)");
    sub->add_option("--half-range", cfg.half_range, "Half dynamic range T")
        ->capture_default_str();
    sub->add_option("--center", cfg.center, "Centre of the dynamic range t_c")
        ->capture_default_str();
    sub->add_option("--report", cfg.report_path, "Write the report here instead of stdout");
    sub->add_option("--report-format", cfg.report_format, "json or csv")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };
  auto add_spatial = [&](CLI::App* sub) {
    sub->add_option("--spatial", cfg.spatial, "Spatial kernel")
        ->check(CLI::IsMember({"gaussian", "box"}))
        ->capture_default_str();
    sub->add_option("--sigma-s", cfg.sigma_s, "Gaussian spatial scale (pixels)");
    sub->add_option("--window", cfg.window_W, "Box half-width W (pixels)");
  };
  auto add_order = [&](CLI::App* sub) {
    auto* d = sub->add_option("--delta", cfg.delta, "Worst-case error target");
    auto* n = sub->add_option("--order", cfg.order_N, "Explicit approximation order N");
    d->excludes(n);
    sub->add_flag("--allow-small-sigma-r", cfg.allow_small_sigma_r,
                  "Permit sigma_r < 10 (may overflow)");
  };

  auto* filter = app.add_subcommand("filter", "Run the fast filter on a PGM image");
  add_common(filter);
  add_spatial(filter);
  add_order(filter);
  filter->add_option("input", cfg.input_path)->required();
  filter->add_option("output", cfg.output_path)->required();

  auto* reference = app.add_subcommand("reference", "Run the exact bilateral filter");
  add_common(reference);
  add_spatial(reference);
  reference->add_option("input", cfg.input_path)->required();
  reference->add_option("output", cfg.output_path)->required();

  auto* compare = app.add_subcommand("compare", "Compare the fast and exact filters");
  add_common(compare);
  add_spatial(compare);
  add_order(compare);
  compare->add_option("input", cfg.input_path)->required();
  compare->add_option("output", cfg.output_path, "Optional fast-filter output");

  auto* order = app.add_subcommand("order", "Estimate the approximation order");
  add_common(order);
  add_spatial(order);
  order->add_option("--epsilon", cfg.epsilon, "Kernel-error budget");
  order->add_option("--delta", cfg.delta, "Filtering accuracy target");

  auto* kernel_error = app.add_subcommand("kernel-error", "Kernel error vs its bound");
  add_common(kernel_error);
  kernel_error->add_option("--order", cfg.order_N, "Approximation order N");

  auto* bench = app.add_subcommand("bench", "Median runtimes over orders and box windows");
  add_common(bench);
  add_spatial(bench);
  bench->add_option("input", cfg.input_path)->required();
  bench->add_option("--orders", cfg.bench_orders)->delimiter(',')->capture_default_str();
  bench->add_option("--windows", cfg.bench_windows)->delimiter(',')->capture_default_str();
  bench->add_option("--box-order", cfg.bench_order, "Order used for the box sweep")
      ->capture_default_str();
  bench->add_option("--repeats", cfg.repeats)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  const std::map<CLI::App*, std::function<json(const RunConfig&)>> commands{
      {filter, cmd_filter},   {reference, cmd_reference},       {compare, cmd_compare},
      {order, cmd_order},     {kernel_error, cmd_kernel_error}, {bench, cmd_bench},
  };
  for (const auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    cfg.command = sub->get_name();
    try {
      emit_report(cfg, fn(cfg), out);
      return kOk;
    } catch (const IoError& e) {
      err << "error: " << e.what() << "\n";
      return kIo;
    } catch (const NumericRangeError& e) {
      err << "error: " << e.what() << "\n";
      return kNumeric;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n" << sub->help();
      return kUsage;
    } catch (const std::domain_error& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    }
  }
  return kUsage;
}

}  // namespace gpabf::cli
