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

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <vector>

#include "equiregion/prob.hpp"
#include "equiregion/region.hpp"

namespace fixtures {

using equiregion::Alphabet;
using equiregion::CondChannel;
using equiregion::JointDist;

inline Alphabet bin(const char* name) { return Alphabet::indexed(name, 2); }
inline Alphabet none(const char* name) { return Alphabet(name, {"-"}); }

// Portable uniform double in [0, 1).
inline double unif(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// X ~ Bern(px), Y = X + Bern(ey), Z = X + Bern(ez) (mod 2), noises independent.
inline JointDist dsbs(double px, double ey, double ez) {
  std::vector<double> m(8);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        const double p = x ? px : 1.0 - px;
        const double a = (x != y) ? ey : 1.0 - ey;
        const double b = (x != z) ? ez : 1.0 - ez;
        m[(x * 2 + y) * 2 + z] = p * a * b;
      }
  return JointDist({bin("X"), bin("Y"), bin("Z")}, m);
}

// Binary X with Y and Z singletons.
inline JointDist lone_bit(double px = 0.5) {
  return JointDist({bin("X"), none("Y"), none("Z")}, {1.0 - px, px});
}

// (X, Z) pair through a BSC, Y singleton.
inline JointDist x_and_z(double px, double ez) {
  std::vector<double> m(4);
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) m[x * 2 + z] = (x ? px : 1.0 - px) * ((x != z) ? ez : 1.0 - ez);
  return JointDist({bin("X"), none("Y"), bin("Z")}, m);
}

inline std::vector<double> random_pmf(std::mt19937_64& rng, std::size_t n, bool sparse = false) {
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& v : p) {
    v = -std::log(1.0 - unif(rng));
    if (sparse && unif(rng) < 0.2) v = 0.0;
    s += v;
  }
  if (s == 0.0) {
    p[0] = 1.0;
    s = 1.0;
  }
  for (auto& v : p) v /= s;
  return p;
}

inline JointDist random_source(std::mt19937_64& rng, std::size_t nx, std::size_t ny, std::size_t nz,
                               bool sparse = false) {
  auto m = random_pmf(rng, nx * ny * nz, sparse);
  double s = 0.0;
  for (double v : m) s += v;
  for (auto& v : m) v /= s;
  return JointDist({Alphabet::indexed("X", nx), Alphabet::indexed("Y", ny), Alphabet::indexed("Z", nz)},
                   m);
}

inline std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, std::size_t rows,
                                                    std::size_t cols, bool sparse = false) {
  std::vector<std::vector<double>> r;
  for (std::size_t i = 0; i < rows; ++i) r.push_back(random_pmf(rng, cols, sparse));
  return r;
}

inline std::vector<std::vector<double>> bsc_rows(double e) { return {{1.0 - e, e}, {e, 1.0 - e}}; }
inline std::vector<std::vector<double>> identity_rows(std::size_t n) {
  std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = 1.0;
  return r;
}
inline std::vector<std::vector<double>> constant_rows(std::size_t rows, std::size_t cols = 1) {
  std::vector<std::vector<double>> r(rows, std::vector<double>(cols, 0.0));
  for (auto& row : r) row[0] = 1.0;
  return r;
}

// Scoped override of the worker count.
struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) { setenv("EQUIREGION_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("EQUIREGION_THREADS"); }
  ThreadsEnv(const ThreadsEnv&) = delete;
  ThreadsEnv& operator=(const ThreadsEnv&) = delete;
};

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace fixtures
