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
#include <limits>

#include "equiregion/region.hpp"

namespace equiregion {

namespace {

void check_source(const JointDist& source, const DistortionMeasure& d) {
  if (source.rank() != 3) throw ProbError("source must be a joint over (X, Y, Z)");
  if (d.source_alphabet().size() != source.variables()[0].size())
    throw ProbError("distortion table rows != |X|");
}

void check_scheme(const JointDist& source, const SchemeParams& s, const DistortionMeasure& d) {
  const auto& x = source.variables()[0];
  if (s.vx.from_vars().size() != 1 || s.vx.to_vars().size() != 1 ||
      s.vx.from_vars()[0].name() != x.name() || s.vx.rows() != x.size())
    throw ProbError("vx must be a channel from '" + x.name() + "' with |X| rows");
  if (s.uv.from_vars().size() != 1 || s.uv.to_vars().size() != 1 ||
      s.uv.from_vars()[0].name() != s.vx.to_vars()[0].name() || s.uv.rows() != s.vx.cols())
    throw ProbError("uv must be a channel from the vx output alphabet");
  const std::size_t ny = source.variables()[1].size();
  if (s.recon.y_size != ny || s.recon.v_size != s.vx.cols() ||
      s.recon.table.size() != ny * s.vx.cols())
    throw ProbError("reconstruction map must be |Y| x |V|");
  for (auto xh : s.recon.table)
    if (xh >= d.recon_alphabet().size()) throw ProbError("reconstruction symbol out of range");
}

// p(x, y, v) as a flat [x][y][v] array.
std::vector<double> joint_xyv(const JointDist& source, const CondChannel& vx) {
  const auto& vars = source.variables();
  const std::size_t nx = vars[0].size(), ny = vars[1].size(), nz = vars[2].size();
  const std::size_t nv = vx.cols();
  std::vector<double> out(nx * ny * nv, 0.0);
  const auto m = source.mass();
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      double pxy = 0.0;
      for (std::size_t z = 0; z < nz; ++z) pxy += m[(x * ny + y) * nz + z];
      for (std::size_t v = 0; v < nv; ++v) out[(x * ny + y) * nv + v] = pxy * vx(x, v);
    }
  return out;
}

}  // namespace

ReconMap optimal_reconstruction(const JointDist& source, const CondChannel& vx,
                                const DistortionMeasure& d) {
  check_source(source, d);
  const std::size_t nx = source.variables()[0].size(), ny = source.variables()[1].size();
  const std::size_t nv = vx.cols(), nxh = d.recon_alphabet().size();
  if (vx.rows() != nx) throw ProbError("vx must have |X| rows");
  const auto pxyv = joint_xyv(source, vx);
  ReconMap r{ny, nv, std::vector<std::size_t>(ny * nv, 0)};
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t v = 0; v < nv; ++v) {
      double pyv = 0.0;
      for (std::size_t x = 0; x < nx; ++x) pyv += pxyv[(x * ny + y) * nv + v];
      if (pyv <= 0.0) continue;
      // Scaling by p(y,v) does not move the argmin.
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t xh = 0; xh < nxh; ++xh) {
        double c = 0.0;
        for (std::size_t x = 0; x < nx; ++x) c += pxyv[(x * ny + y) * nv + v] * d(x, xh);
        if (c < best) {
          best = c;
          r.table[y * nv + v] = xh;
        }
      }
    }
  return r;
}

SchemeParams make_scheme(const JointDist& source, const DistortionMeasure& d,
                         const std::vector<std::vector<double>>& vx_rows,
                         const std::vector<std::vector<double>>& uv_rows) {
  check_source(source, d);
  if (vx_rows.empty() || uv_rows.empty()) throw ProbError("scheme channels must be non-empty");
  const Alphabet v = Alphabet::indexed("V", vx_rows.front().size());
  const Alphabet u = Alphabet::indexed("U", uv_rows.front().size());
  CondChannel vx = CondChannel::from_rows(source.variables()[0], v, vx_rows);
  CondChannel uv = CondChannel::from_rows(v, u, uv_rows);
  ReconMap recon = optimal_reconstruction(source, vx, d);
  return SchemeParams{std::move(vx), std::move(uv), std::move(recon)};
}

BoundEvaluation evaluate_bounds(const JointDist& source, const SchemeParams& scheme,
                                const DistortionMeasure& d, double key_rate) {
  check_source(source, d);
  check_scheme(source, scheme, d);
  if (!(key_rate >= 0.0) || !std::isfinite(key_rate))
    throw ProbError("key rate must be finite and non-negative");

  const JointDist j = compose(source, scheme.vx, scheme.uv);
  const auto& vars = source.variables();
  const std::string X = vars[0].name(), Y = vars[1].name(), Z = vars[2].name();
  const std::string V = scheme.vx.to_vars()[0].name(), U = scheme.uv.to_vars()[0].name();

  BoundEvaluation b;
  b.diag.i_xv_given_y = cond_mutual_info(j, {X}, {V}, {Y});
  b.diag.i_yv_given_u = cond_mutual_info(j, {Y}, {V}, {U});
  b.diag.i_zv_given_u = cond_mutual_info(j, {Z}, {V}, {U});
  b.diag.h_x_given_zv = cond_entropy(j, {X}, {Z, V});
  b.diag.h_x_given_zu = cond_entropy(j, {X}, {Z, U});

  b.rate_min = b.diag.i_xv_given_y;
  b.equiv_max = std::min(b.diag.i_yv_given_u - b.diag.i_zv_given_u + b.diag.h_x_given_zv + key_rate,
                         b.diag.h_x_given_zu);

  const std::size_t nx = vars[0].size(), ny = vars[1].size(), nv = scheme.vx.cols();
  const auto pxyv = joint_xyv(source, scheme.vx);
  double dist = 0.0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t v = 0; v < nv; ++v) dist += pxyv[(x * ny + y) * nv + v] * d(x, scheme.recon(y, v));
  b.distortion = dist;
  return b;
}

bool scheme_covers(const JointDist& source, const SchemeParams& scheme, const DistortionMeasure& d,
                   const RegionPoint& point) {
  const BoundEvaluation b = evaluate_bounds(source, scheme, d, point.key_rate);
  return point.rate >= b.rate_min - kAchieveSlack && point.distortion >= b.distortion - kAchieveSlack &&
         point.equivocation <= b.equiv_max + kAchieveSlack;
}

SchemeParams embed_scheme(const JointDist& source, const DistortionMeasure& d,
                          const SchemeParams& scheme, std::size_t v_card, std::size_t u_card) {
  const std::size_t nv = scheme.v_card(), nu = scheme.u_card();
  if (v_card < nv || u_card < nu) throw ProbError("embedding cannot shrink alphabets");
  std::vector<std::vector<double>> vx(scheme.vx.rows(), std::vector<double>(v_card, 0.0));
  for (std::size_t x = 0; x < scheme.vx.rows(); ++x)
    for (std::size_t v = 0; v < nv; ++v) vx[x][v] = scheme.vx(x, v);
  // New V symbols are never used; give them U's first symbol.
  std::vector<std::vector<double>> uv(v_card, std::vector<double>(u_card, 0.0));
  for (std::size_t v = 0; v < v_card; ++v) {
    if (v < nv) {
      for (std::size_t u = 0; u < nu; ++u) uv[v][u] = scheme.uv(v, u);
    } else {
      uv[v][0] = 1.0;
    }
  }
  return make_scheme(source, d, vx, uv);
}

}  // namespace equiregion
