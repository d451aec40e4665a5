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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "gpabf/error.hpp"
#include "gpabf/image.hpp"

// Binary greymap (PGM "P5") reading and writing, 8 bits per sample.

namespace gpabf {

namespace detail {

inline void skip_pgm_space(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline int read_pgm_int(std::istream& in, const char* field) {
  skip_pgm_space(in);
  int value = -1;
  if (!(in >> value) || value <= 0) {
    throw IoError(std::string("PGM: bad or missing ") + field);
  }
  return value;
}

}  // namespace detail

inline Image read_pgm(std::istream& in) {
  char magic[2] = {};
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5') {
    throw IoError("PGM: expected binary 'P5' magic");
  }
  const int width = detail::read_pgm_int(in, "width");
  const int height = detail::read_pgm_int(in, "height");
  const int maxval = detail::read_pgm_int(in, "maxval");
  if (maxval > 255) throw IoError("PGM: only 8-bit data (maxval <= 255) is supported");
  // Exactly one whitespace byte separates the header from the raster.
  if (!std::isspace(in.get())) throw IoError("PGM: malformed header");

  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw IoError("PGM: truncated raster");
  }
  std::vector<double> samples(raw.begin(), raw.end());
  return Image(width, height, std::move(samples));
}

inline Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_pgm(in);
}

/// Samples are clamped to [0, 255] and rounded half away from zero.
inline std::uint8_t quantize_8bit(double v) {
  const double r = std::round(std::clamp(v, 0.0, 255.0));
  return static_cast<std::uint8_t>(r);
}

inline void write_pgm(std::ostream& out, const Image& img) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<char> raw(img.size());
  const auto s = img.samples();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<char>(quantize_8bit(s[i]));
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("PGM: write failed");
}

inline void write_pgm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_pgm(out, img);
}

}  // namespace gpabf
