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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "test_support.hpp"

namespace gpabf {
namespace {

namespace fs = std::filesystem;
using cli::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;

  json report() const { return json::parse(out); }
};

Outcome run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"gpabf"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gpabf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    write_pgm(path("noise.pgm"), testing::random_image(64, 64, 77));
    write_pgm(path("flat.pgm"), Image(32, 32, 100.0));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, FilterWithDeltaRecordsResolvedOrder) {
  const auto r = run_cli({"filter", "--spatial", "gaussian", "--sigma-s", "5", "--sigma-r", "50",
                          "--delta", "0.1", path("noise.pgm"), path("out.pgm")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json report = r.report();
  const double eps = epsilon_from_delta(0.1, SpatialKernel::gaussian(5).w0(), 128);
  EXPECT_EQ(report["order"]["N0"].get<int>(), estimate_order(50, eps, 128).N0);
  EXPECT_EQ(report["order"]["method"], "lambertw_newton");
  EXPECT_TRUE(report["runtime_ms"].contains("gpa"));
  const Image out = read_pgm(path("out.pgm"));
  EXPECT_EQ(out.width(), 64);
}

TEST_F(CliTest, FilterWithExplicitOrder) {
  const auto r = run_cli({"filter", "--spatial", "box", "--window", "10", "--sigma-r", "30",
                          "--order", "40", path("noise.pgm"), path("out.pgm")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json report = r.report();
  EXPECT_EQ(report["order"]["N0"], 40);
  EXPECT_EQ(report["order"]["method"], "explicit");
  EXPECT_EQ(report["spatial_filterings"], 41);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({"filter", "--spatial", "gaussian", "--sigma-r", "30", "--order", "5",
                     path("noise.pgm"), path("out.pgm")}).code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"filter", "--spatial", "box", "--sigma-r", "30", "--order", "5",
                     path("noise.pgm"), path("out.pgm")}).code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"filter", "--spatial", "box", "--window", "2", "--sigma-r", "30",
                     path("noise.pgm"), path("out.pgm")}).code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"filter", "--spatial", "box", "--window", "2", "--sigma-r", "30", "--order",
                     "5", "--delta", "1", path("noise.pgm"), path("out.pgm")}).code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"filter", "--spatial", "box", "--window", "2", "--sigma-r", "5", "--order",
                     "5", path("noise.pgm"), path("out.pgm")}).code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"order", "--sigma-r", "30"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
}

TEST_F(CliTest, IoErrors) {
  EXPECT_EQ(run_cli({"filter", "--spatial", "box", "--window", "2", "--sigma-r", "30", "--order",
                     "5", path("missing.pgm"), path("out.pgm")}).code,
            cli::kIo);
  EXPECT_EQ(run_cli({"filter", "--spatial", "box", "--window", "2", "--sigma-r", "30", "--order",
                     "5", path("noise.pgm"), path("no/such/dir/out.pgm")}).code,
            cli::kIo);
}

TEST_F(CliTest, OverflowGivesNumericExitCode) {
  write_pgm(path("mid.pgm"), Image(8, 8, 168.0));
  const auto r = run_cli({"filter", "--spatial", "box", "--window", "1", "--sigma-r", "2",
                          "--allow-small-sigma-r", "--order", "400", path("mid.pgm"),
                          path("out.pgm")});
  EXPECT_EQ(r.code, cli::kNumeric);
}

TEST_F(CliTest, CompareMeetsDelta) {
  const auto r = run_cli({"compare", "--spatial", "gaussian", "--sigma-s", "5", "--sigma-r", "50",
                          "--delta", "0.1", path("noise.pgm")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json report = r.report();
  EXPECT_LE(report["errors"]["linf"].get<double>(), 0.1);
  EXPECT_TRUE(report["errors"]["mse_db"].is_number());
  EXPECT_TRUE(report["runtime_ms"].contains("gpa"));
  EXPECT_TRUE(report["runtime_ms"].contains("reference"));
  EXPECT_LE(report["bounds"]["kernel_sup"].get<double>(),
            report["bounds"]["kernel_bound"].get<double>());
  EXPECT_LE(report["bounds"]["accuracy_bound"].get<double>(), 0.1);
}

TEST_F(CliTest, CompareConstantInput) {
  // At the range centre every power of H vanishes and the result is exact.
  write_pgm(path("mid.pgm"), Image(32, 32, 128.0));
  auto r = run_cli({"compare", "--spatial", "box", "--window", "3", "--sigma-r", "30",
                    "--order", "10", path("mid.pgm")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  json report = r.report();
  EXPECT_EQ(report["errors"]["linf"].get<double>(), 0.0);
  EXPECT_EQ(report["errors"]["mse_db"], "-inf");
  EXPECT_EQ(report["errors"]["linf_db"], "-inf");

  // Elsewhere the running sums leave rounding noise.
  r = run_cli({"compare", "--spatial", "box", "--window", "3", "--sigma-r", "30", "--order",
               "10", path("flat.pgm")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  report = r.report();
  EXPECT_LE(report["errors"]["linf"].get<double>(), 1e-9);
}

TEST_F(CliTest, CompareErrorShrinksWithOrder) {
  const auto low = run_cli({"compare", "--spatial", "box", "--window", "10", "--sigma-r", "30",
                            "--order", "10", path("noise.pgm")});
  const auto high = run_cli({"compare", "--spatial", "box", "--window", "10", "--sigma-r", "30",
                             "--order", "60", path("noise.pgm")});
  ASSERT_EQ(low.code, cli::kOk) << low.err;
  ASSERT_EQ(high.code, cli::kOk) << high.err;
  EXPECT_LT(high.report()["errors"]["linf"].get<double>(),
            low.report()["errors"]["linf"].get<double>());
}

TEST_F(CliTest, OrderFromEpsilon) {
  const auto r = run_cli({"order", "--sigma-r", "30", "--epsilon", "1e-3"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json report = r.report();
  EXPECT_EQ(report["order"]["N0"], 37);
  EXPECT_EQ(report["orders"]["chernoff_exhaustive"]["N0"], 37);
  EXPECT_EQ(report["orders"]["chebyshev"]["N0"], 154);
  EXPECT_FALSE(report["orders"].contains("yang_formula"));
}

TEST_F(CliTest, OrderFromDelta) {
  const auto r = run_cli({"order", "--sigma-r", "30", "--delta", "0.1", "--spatial", "gaussian",
                          "--sigma-s", "5"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json report = r.report();
  EXPECT_EQ(report["orders"]["approx_formula"]["N0"], 44);
  EXPECT_EQ(report["orders"]["yang_formula"]["N0"], 401);
  EXPECT_NEAR(report["spatial_w0"].get<double>(), 0.0063904802821230361, 1e-15);
}

TEST_F(CliTest, OrderLargeSigma) {
  const auto r = run_cli({"order", "--sigma-r", "80", "--epsilon", "1e-3"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.report()["order"]["N0"], 10);
  EXPECT_EQ(r.report()["order"]["method"], "fixed_large_sigma");
}

TEST_F(CliTest, KernelError) {
  auto r = run_cli({"kernel-error", "--sigma-r", "30", "--order", "40"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.report()["bounds"]["holds"], true);

  r = run_cli({"kernel-error", "--sigma-r", "30", "--order", "300"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_LE(r.report()["bounds"]["kernel_sup"].get<double>(), 1e-12);

  r = run_cli({"kernel-error", "--sigma-r", "30", "--order", "1"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NEAR(r.report()["bounds"]["kernel_sup"].get<double>(),
              1.0 - std::exp(-128.0 * 128.0 / 900.0), 1e-15);
}

TEST_F(CliTest, BenchReportIsValidJson) {
  const auto r = run_cli({"bench", "--spatial", "box", "--window", "2", "--sigma-r", "30",
                          "--orders", "2,4", "--windows", "1,3", "--box-order", "2",
                          "--repeats", "1", path("noise.pgm")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json report = r.report();
  ASSERT_EQ(report["bench"]["gpa"].size(), 2u);
  EXPECT_EQ(report["bench"]["gpa"][1]["filterings"], 5);
  ASSERT_EQ(report["bench"]["box"].size(), 2u);
  EXPECT_GT(report["bench"]["box_ratio"].get<double>(), 0.0);
}

TEST_F(CliTest, CsvReportFlattensKeys) {
  const auto r = run_cli({"order", "--sigma-r", "30", "--epsilon", "1e-3", "--report-format",
                          "csv"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::string values;
  std::getline(lines, header);
  std::getline(lines, values);
  EXPECT_NE(header.find("order.N0"), std::string::npos);
  EXPECT_NE(header.find("params.sigma_r"), std::string::npos);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','),
            std::count(values.begin(), values.end(), ','));
}

TEST_F(CliTest, ReportFileRoundTripsParameters) {
  const auto r = run_cli({"filter", "--spatial", "gaussian", "--sigma-s", "2.5", "--sigma-r",
                          "42.5", "--delta", "0.25", "--report", path("report.json"),
                          path("noise.pgm"), path("out.pgm")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  const json report = json::parse(slurp(path("report.json")));
  EXPECT_EQ(report["params"]["command"], "filter");
  EXPECT_EQ(report["params"]["spatial"], "gaussian");
  EXPECT_EQ(report["params"]["sigma_s"].get<double>(), 2.5);
  EXPECT_EQ(report["params"]["sigma_r"].get<double>(), 42.5);
  EXPECT_EQ(report["params"]["delta"].get<double>(), 0.25);
  EXPECT_FALSE(report["params"].contains("order"));
  EXPECT_EQ(json::parse(report.dump()), report);
}

TEST_F(CliTest, DeterministicOutput) {
  for (const char* name : {"a.pgm", "b.pgm"}) {
    const auto r = run_cli({"filter", "--spatial", "gaussian", "--sigma-s", "3", "--sigma-r",
                            "30", "--delta", "0.5", path("noise.pgm"), path(name)});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
  }
  EXPECT_EQ(slurp(path("a.pgm")), slurp(path("b.pgm")));
  const auto x = run_cli({"order", "--sigma-r", "23", "--epsilon", "1e-4"});
  const auto y = run_cli({"order", "--sigma-r", "23", "--epsilon", "1e-4"});
  EXPECT_EQ(x.out, y.out);
}

}  // namespace
}  // namespace gpabf
