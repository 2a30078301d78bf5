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

#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "equiregion/kernels.hpp"

namespace equiregion::detail {

namespace {

double clamp_info(double v) { return std::fabs(v) < kInfoClamp ? 0.0 : v; }

double h(const std::vector<double>& m) { return kernels::entropy_bits(m); }

}  // namespace

SourceTables::SourceTables(const JointDist& source, const DistortionMeasure& d) {
  if (source.rank() != 3) throw ProbError("source must be a joint over (X, Y, Z)");
  const auto& v = source.variables();
  nx = v[0].size();
  ny = v[1].size();
  nz = v[2].size();
  nxhat = d.recon_alphabet().size();
  if (d.source_alphabet().size() != nx) throw ProbError("distortion source alphabet != |X|");
  pxy.assign(nx * ny, 0.0);
  pxz.assign(nx * nz, 0.0);
  const auto m = source.mass();
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t z = 0; z < nz; ++z) {
        const double p = m[(x * ny + y) * nz + z];
        pxy[x * ny + y] += p;
        pxz[x * nz + z] += p;
      }
  dist.assign(d.table().begin(), d.table().end());
  std::vector<double> py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) py[y] += pxy[x * ny + y];
  h_x_given_y = h(pxy) - h(py);
}

void VLevel::build(const SourceTables& s, std::span<const double> vx, std::size_t nv_) {
  nv = nv_;
  pxyv.resize(s.nx * s.ny * nv);
  pxzv.resize(s.nx * s.nz * nv);
  pyv.assign(s.ny * nv, 0.0);
  for (std::size_t x = 0; x < s.nx; ++x) {
    const double* row = vx.data() + x * nv;
    for (std::size_t y = 0; y < s.ny; ++y) {
      const double p = s.pxy[x * s.ny + y];
      double* o = pxyv.data() + (x * s.ny + y) * nv;
      for (std::size_t k = 0; k < nv; ++k) {
        o[k] = p * row[k];
        pyv[y * nv + k] += o[k];
      }
    }
    for (std::size_t z = 0; z < s.nz; ++z) {
      const double p = s.pxz[x * s.nz + z];
      double* o = pxzv.data() + (x * s.nz + z) * nv;
      for (std::size_t k = 0; k < nv; ++k) o[k] = p * row[k];
    }
  }
  h_x_given_yv = h(pxyv) - h(pyv);
  rate = std::max(0.0, clamp_info(s.h_x_given_y - h_x_given_yv));

  distortion = 0.0;
  for (std::size_t y = 0; y < s.ny; ++y) {
    for (std::size_t k = 0; k < nv; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t xh = 0; xh < s.nxhat; ++xh) {
        double c = 0.0;
        for (std::size_t x = 0; x < s.nx; ++x)
          c += pxyv[(x * s.ny + y) * nv + k] * s.dist[x * s.nxhat + xh];
        if (c < best) best = c;
      }
      distortion += best;
    }
  }
}

double UEvaluator::equivocation(const SourceTables& s, const VLevel& v, const double* uv,
                                std::size_t nu, double key_rate) {
  const std::size_t nxy = s.nx * s.ny, nxz = s.nx * s.nz;
  pxyu_.resize(nxy * nu);
  pxzu_.resize(nxz * nu);
  kernels::mix(v.pxyv.data(), uv, pxyu_.data(), nxy, v.nv, nu);
  kernels::mix(v.pxzv.data(), uv, pxzu_.data(), nxz, v.nv, nu);
  pyu_.assign(s.ny * nu, 0.0);
  pzu_.assign(s.nz * nu, 0.0);
  for (std::size_t x = 0; x < s.nx; ++x) {
    for (std::size_t i = 0; i < s.ny * nu; ++i) pyu_[i] += pxyu_[x * s.ny * nu + i];
    for (std::size_t i = 0; i < s.nz * nu; ++i) pzu_[i] += pxzu_[x * s.nz * nu + i];
  }
  const double hxzu = std::max(0.0, clamp_info(h(pxzu_) - h(pzu_)));
  const double hxyu = h(pxyu_) - h(pyu_);
  const double leak = clamp_info(hxyu - v.h_x_given_yv);
  return std::min(hxzu - leak + key_rate, hxzu);
}

SimplexGrid::SimplexGrid(std::size_t k, int g) : k_(k), g_(g) {
  if (k == 0 || g <= 0) throw ProbError("simplex grid needs k >= 1 and g >= 1");
  std::vector<int> c(k, 0);
  // Recursive fill, first coordinate from g down to 0.
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == k) {
      c[pos] = left;
      counts_.insert(counts_.end(), c.begin(), c.end());
      ++count_;
      return;
    }
    for (int a = left; a >= 0; --a) {
      c[pos] = a;
      self(self, pos + 1, left - a);
    }
  };
  rec(rec, 0, g);
  points_.resize(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i)
    points_[i] = static_cast<double>(counts_[i]) / static_cast<double>(g);
}

std::size_t grid_product(std::size_t per_row, std::size_t rows) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t n = 1;
  for (std::size_t r = 0; r < rows; ++r) {
    if (per_row != 0 && n > kMax / per_row) return kMax;
    n *= per_row;
  }
  return n;
}

}  // namespace equiregion::detail
