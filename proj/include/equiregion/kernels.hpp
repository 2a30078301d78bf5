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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense inner-loop kernels. Each exists as a scalar reference and, where the
// build and CPU allow, an AVX2+FMA variant chosen once at startup.
// EQUIREGION_SIMD=scalar|avx2|auto overrides the choice.
namespace equiregion::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  double (*sum)(const double* p, std::size_t n);
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
  // -sum p log2 p over entries with p > 0.
  double (*entropy_bits)(const double* p, std::size_t n);
  // out[r, c] = sum_k a[r, k] * m[k, c]; out is rows x cols, row-major.
  void (*mix)(const double* a, const double* m, double* out, std::size_t rows, std::size_t inner,
              std::size_t cols);
};

bool supported(Isa isa);
const KernelTable& table(Isa isa);  // throws std::runtime_error if unsupported
const KernelTable& active();
std::string_view active_name();

inline double sum(std::span<const double> p) { return active().sum(p.data(), p.size()); }
inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  return active().l1_distance(a.data(), b.data(), a.size());
}
inline double entropy_bits(std::span<const double> p) {
  return active().entropy_bits(p.data(), p.size());
}
inline void mix(const double* a, const double* m, double* out, std::size_t rows, std::size_t inner,
                std::size_t cols) {
  active().mix(a, m, out, rows, inner, cols);
}

namespace detail {
const KernelTable& scalar_table();
#if defined(EQUIREGION_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace equiregion::kernels
