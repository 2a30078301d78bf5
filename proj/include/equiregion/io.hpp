// Copyright 2026 the equiregion authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File formats used by the command-line tool.
//
// Source specification (JSON):
//   {
//     "alphabets": {"X": ["0", "1"], "Y": ["0", "1"], "Z": ["0", "1"], "Xhat": ["0", "1"]},
//     "pmf": [p(x0,y0,z0), p(x0,y0,z1), ...],          // row-major X, Y, Z
//     "distortion": [[d(x0,xh0), d(x0,xh1)], ...]       // optional
//   }
// "Y" and "Z" may be omitted or empty, meaning no side information (a
// one-symbol alphabet). "Xhat" defaults to the X alphabet; "distortion"
// defaults to Hamming and is required when the two alphabets differ.
//
// Scheme (JSON): {"vx": [[p(v|x0)...], ...], "uv": [[p(u|v0)...], ...]}.
// The decoder map is the distortion-optimal one.

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "equiregion/prob.hpp"
#include "equiregion/region.hpp"

namespace equiregion {

// Input validation failure. what() names the offending field or location.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceSpec {
  JointDist source;  // over X, Y, Z
  DistortionMeasure distortion;
};

// `origin` prefixes diagnostics (usually the file name).
SourceSpec parse_source_spec(std::string_view json_text, std::string_view origin = "source");
SourceSpec load_source_spec(const std::string& path);

SchemeParams parse_scheme(std::string_view json_text, const SourceSpec& spec, std::string_view origin = "scheme");
SchemeParams load_scheme(const std::string& path, const SourceSpec& spec);

// Compact, lossless, comma-free text form of a scheme:
//   "V<|V|>U<|U|>;vx:<row-major p(v|x)>;uv:<row-major p(u|v)>;xh:<xhat(y,v) y-major>"
// with space-separated values printed to 17 significant digits.
std::string encode_scheme(const SchemeParams& scheme);
SchemeParams decode_scheme(std::string_view digest, const SourceSpec& spec);

// ---- CSV ----

// 12 significant digits, '.' decimal, no locale.
std::string format_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

// Quoted fields, doubled quotes and embedded separators are handled.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// "a:b:step" inclusive of b (within step / 1e6).
std::vector<double> parse_range(std::string_view text, std::string_view flag);

}  // namespace equiregion
