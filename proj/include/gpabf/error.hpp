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

#include <stdexcept>
#include <string>

namespace gpabf {

/// Invalid argument: nonpositive scale, bad window, mismatched sizes, ...
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sample lies outside the declared dynamic range.
class RangeViolation : public std::domain_error {
 public:
  RangeViolation(int x, int y, double value, const std::string& what)
      : std::domain_error(what), x_(x), y_(y), value_(value) {}

  int x() const noexcept { return x_; }
  int y() const noexcept { return y_; }
  double value() const noexcept { return value_; }

 private:
  int x_;
  int y_;
  double value_;
};

/// The filtering-accuracy bound is vacuous (kernel error >= w(0)).
class BoundInapplicable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Intermediate values left the representable double range.
class NumericRangeError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gpabf
