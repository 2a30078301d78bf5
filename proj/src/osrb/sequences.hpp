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

// Sequence indexing: letter 0 is the most significant digit.

#pragma once

#include <cstddef>
#include <vector>

#include "equiregion/osrb.hpp"

namespace equiregion::detail {

inline std::size_t ipow(std::size_t b, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= b;
  return r;
}

// digits(k, n)[s * n + i] is letter i of sequence s.
inline std::vector<std::size_t> digits(std::size_t k, int n) {
  const std::size_t count = ipow(k, n);
  std::vector<std::size_t> d(count * n);
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t t = s;
    for (int i = n; i-- > 0;) {
      d[s * n + i] = t % k;
      t /= k;
    }
  }
  return d;
}

// n-fold Kronecker power of a rows x cols matrix: entry [a^n][b^n] = prod m[a_i][b_i].
inline std::vector<double> kron_power(const std::vector<double>& m, std::size_t rows, std::size_t cols, int n) {
  std::vector<double> cur{1.0};
  std::size_t R = 1, C = 1;
  for (int step = 0; step < n; ++step) {
    std::vector<double> next(R * rows * C * cols);
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t a = 0; a < rows; ++a)
        for (std::size_t c = 0; c < C; ++c)
          for (std::size_t b = 0; b < cols; ++b)
            next[(r * rows + a) * (C * cols) + c * cols + b] = cur[r * C + c] * m[a * cols + b];
    cur = std::move(next);
    R *= rows;
    C *= cols;
  }
  return cur;
}

// p(x^n, y^n, z^n) stored [x^n][y^n][z^n].
inline std::vector<double> source_sequences(const ProtocolPair& p) {
  const int n = p.n();
  const std::size_t nx = p.letters_x(), ny = p.letters_y(), nz = p.letters_z();
  const auto dx = digits(nx, n), dy = digits(ny, n), dz = digits(nz, n);
  const std::size_t NX = p.x_count(), NY = p.y_count(), NZ = p.z_count();
  const auto& s1 = p.source_letters();
  std::vector<double> out(NX * NY * NZ);
  for (std::size_t x = 0; x < NX; ++x)
    for (std::size_t y = 0; y < NY; ++y)
      for (std::size_t z = 0; z < NZ; ++z) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) w *= s1[(dx[x * n + i] * ny + dy[y * n + i]) * nz + dz[z * n + i]];
        out[(x * NY + y) * NZ + z] = w;
      }
  return out;
}

}  // namespace equiregion::detail
