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

#include <cmath>

#include "equiregion/kernels.hpp"

namespace equiregion::kernels::detail {
namespace {

double scalar_sum(const double* p, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += p[i];
  return s;
}

double scalar_l1(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double scalar_entropy(const double* p, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) s -= p[i] * std::log2(p[i]);
  }
  return s;
}

void scalar_mix(const double* a, const double* m, double* out, std::size_t rows,
                std::size_t inner, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* o = out + r * cols;
    for (std::size_t c = 0; c < cols; ++c) o[c] = 0.0;
    for (std::size_t k = 0; k < inner; ++k) {
      const double w = a[r * inner + k];
      if (w == 0.0) continue;
      const double* mk = m + k * cols;
      for (std::size_t c = 0; c < cols; ++c) o[c] += w * mk[c];
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::kScalar, "scalar", scalar_sum, scalar_l1, scalar_entropy,
                             scalar_mix};
  return t;
}

}  // namespace equiregion::kernels::detail
