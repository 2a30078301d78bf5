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

// Flat-array evaluator used inside the search loops. It relies on the
// Markov structure to avoid building five-variable tensors; the public
// evaluate_bounds is the generic reference it is tested against.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "equiregion/prob.hpp"

namespace equiregion::detail {

struct SourceTables {
  SourceTables(const JointDist& source, const DistortionMeasure& d);

  std::size_t nx, ny, nz, nxhat;
  std::vector<double> pxy;   // [x][y]
  std::vector<double> pxz;   // [x][z]
  std::vector<double> dist;  // [x][xhat]
  double h_x_given_y = 0.0;
};

// Everything that depends on p(v|x) only.
struct VLevel {
  void build(const SourceTables& s, std::span<const double> vx, std::size_t nv);

  std::size_t nv = 0;
  std::vector<double> pxyv;  // [x][y][v]
  std::vector<double> pxzv;  // [x][z][v]
  std::vector<double> pyv;
  double h_x_given_yv = 0.0;
  double rate = 0.0;        // I(X;V|Y)
  double distortion = 0.0;  // with the optimal decoder
};

class UEvaluator {
 public:
  // min{H(X|Z,U) - I(X;V|Y,U) + key_rate, H(X|Z,U)}
  double equivocation(const SourceTables& s, const VLevel& v, const double* uv, std::size_t nu,
                      double key_rate);

 private:
  std::vector<double> pxyu_, pyu_, pxzu_, pzu_;
};

// Quantized simplex {c / g : c in N^k, sum c = g}. Index 0 is the vertex
// on symbol 0; the first coordinate decreases along the enumeration.
class SimplexGrid {
 public:
  SimplexGrid(std::size_t k, int g);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return k_; }
  int steps() const { return g_; }
  const double* point(std::size_t i) const { return points_.data() + i * k_; }
  const int* counts(std::size_t i) const { return counts_.data() + i * k_; }

 private:
  std::size_t k_;
  int g_;
  std::size_t count_ = 0;
  std::vector<int> counts_;
  std::vector<double> points_;
};

// Saturating product of grid sizes over rows.
std::size_t grid_product(std::size_t per_row, std::size_t rows);

}  // namespace equiregion::detail
