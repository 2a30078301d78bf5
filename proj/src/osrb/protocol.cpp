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

#include "equiregion/osrb.hpp"
#include "sequences.hpp"

namespace equiregion {

namespace {

using detail::digits;
using detail::ipow;
using detail::kron_power;

constexpr std::size_t kTableLimit = std::size_t{1} << 26;

void check_table(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > kTableLimit / a) throw EnumerationBudgetError(std::string(what) + " exceeds the enumeration budget");
}

}  // namespace

ProtocolPair build_protocols(const JointDist& source, const SchemeParams& scheme, const BinningConfig& cfg,
                             const BinningRealization& real) {
  cfg.validate();
  if (source.rank() != 3) throw ProbError("source must be a joint over (X, Y, Z)");
  const auto& vars = source.variables();
  if (scheme.vx.rows() != vars[0].size()) throw ProbError("p(v|x) rows must match |X|");
  if (scheme.uv.rows() != scheme.vx.cols()) throw ProbError("p(u|v) rows must match |V|");
  if (scheme.recon.y_size != vars[1].size() || scheme.recon.v_size != scheme.vx.cols())
    throw ProbError("reconstruction map does not match |Y| x |V|");

  ProtocolPair p(scheme);
  p.cfg_ = cfg;
  p.nx_ = vars[0].size();
  p.ny_ = vars[1].size();
  p.nz_ = vars[2].size();
  p.nv_ = scheme.vx.cols();
  p.nu_ = scheme.uv.cols();
  const int n = cfg.n;
  const double bits = n * (std::log2(double(p.nx_)) + std::log2(double(p.ny_)) + std::log2(double(p.nz_)) +
                           std::log2(double(p.nu_)) + std::log2(double(p.nv_)));
  if (bits > kSequenceBudgetBits + 1e-9)
    throw EnumerationBudgetError("n * sum(log2 |alphabet|) = " + std::to_string(bits) +
                                 " exceeds the exact-enumeration budget of 24 bits");
  double bin_bits = 0.0;
  for (double r : {cfg.r1, cfg.r2, cfg.rt1, cfg.rt2, cfg.r0, cfg.r0_public})
    bin_bits += std::log2(double(BinningConfig::bins(n, r)));
  if (bin_bits > 62.0) throw EnumerationBudgetError("combined bin index space exceeds 2^62");

  p.nxs_ = ipow(p.nx_, n);
  p.nys_ = ipow(p.ny_, n);
  p.nzs_ = ipow(p.nz_, n);
  p.nvs_ = ipow(p.nv_, n);
  p.nus_ = ipow(p.nu_, n);
  if (real.m1.size() != p.nvs_ || real.m2.size() != p.nus_)
    throw ProbError("realization does not match the sequence alphabets");
  p.real_ = real;
  p.kb_ = cfg.k_bins();
  p.kpb_ = cfg.kp_bins();
  p.f2b_ = cfg.f2_bins();
  const std::uint64_t nkey = cfg.f1_bins() * p.kb_ * p.kpb_ * p.f2b_;
  check_table(p.nxs_, nkey, "P_A(key | x^n) table");
  p.nkey_ = nkey;

  // Single-letter tables.
  const auto m = source.mass();
  p.src1_.assign(m.begin(), m.end());
  std::vector<double> pxy(p.nx_ * p.ny_, 0.0), pxz(p.nx_ * p.nz_, 0.0), pyv(p.ny_ * p.nv_, 0.0);
  for (std::size_t x = 0; x < p.nx_; ++x)
    for (std::size_t y = 0; y < p.ny_; ++y)
      for (std::size_t z = 0; z < p.nz_; ++z) {
        pxy[x * p.ny_ + y] += m[(x * p.ny_ + y) * p.nz_ + z];
        pxz[x * p.nz_ + z] += m[(x * p.ny_ + y) * p.nz_ + z];
      }
  for (std::size_t x = 0; x < p.nx_; ++x)
    for (std::size_t y = 0; y < p.ny_; ++y)
      for (std::size_t v = 0; v < p.nv_; ++v) pyv[y * p.nv_ + v] += pxy[x * p.ny_ + y] * scheme.vx(x, v);
  std::vector<double> px(p.nx_, 0.0);
  for (std::size_t x = 0; x < p.nx_; ++x)
    for (std::size_t y = 0; y < p.ny_; ++y) px[x] += pxy[x * p.ny_ + y];

  p.pxy_ = kron_power(pxy, p.nx_, p.ny_, n);
  p.pxz_ = kron_power(pxz, p.nx_, p.nz_, n);
  p.px_ = kron_power(px, 1, p.nx_, n);
  p.pvx_ = kron_power({scheme.vx.kernel().begin(), scheme.vx.kernel().end()}, p.nx_, p.nv_, n);
  p.puv_ = kron_power({scheme.uv.kernel().begin(), scheme.uv.kernel().end()}, p.nv_, p.nu_, n);
  p.pyv_ = kron_power(pyv, p.ny_, p.nv_, n);

  // P_A(key | x^n).
  p.pkey_.assign(p.nxs_ * p.nkey_, 0.0);
  for (std::size_t x = 0; x < p.nxs_; ++x) {
    double* row = p.pkey_.data() + x * p.nkey_;
    for (std::size_t v = 0; v < p.nvs_; ++v) {
      const double a = p.pvx_[x * p.nvs_ + v];
      if (a == 0.0) continue;
      for (std::size_t u = 0; u < p.nus_; ++u) row[p.key_of(u, v)] += a * p.puv_[v * p.nus_ + u];
    }
  }
  double zero = 0.0;
  for (std::size_t x = 0; x < p.nxs_; ++x) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < p.nkey_; ++k) c += p.pkey_[x * p.nkey_ + k] == 0.0;
    zero += p.px_[x] * double(c) / double(p.nkey_);
  }
  p.zero_mass_ = zero;
  return p;
}

ProtocolPair build_protocols(const JointDist& source, const SchemeParams& scheme, const BinningConfig& cfg,
                             std::uint64_t seed) {
  cfg.validate();
  const auto& vars = source.variables();
  if (source.rank() != 3) throw ProbError("source must be a joint over (X, Y, Z)");
  const double bits = cfg.n * (std::log2(double(vars[0].size())) + std::log2(double(vars[1].size())) +
                               std::log2(double(vars[2].size())) + std::log2(double(scheme.u_card())) +
                               std::log2(double(scheme.v_card())));
  if (bits > kSequenceBudgetBits + 1e-9)
    throw EnumerationBudgetError("n * sum(log2 |alphabet|) = " + std::to_string(bits) +
                                 " exceeds the exact-enumeration budget of 24 bits");
  const auto real = BinningRealization::draw(cfg, ipow(scheme.v_card(), cfg.n), ipow(scheme.u_card(), cfg.n), seed);
  return build_protocols(source, scheme, cfg, real);
}

std::vector<double> protocol_a_sequence_marginal(const ProtocolPair& p) {
  const std::size_t NX = p.x_count(), NY = p.y_count(), NZ = p.z_count(), NU = p.u_count(),
                    NV = p.v_count(), NK = p.key_count();
  const auto pxyz = detail::source_sequences(p);
  std::vector<double> out(NX * NY * NZ * NU * NV, 0.0);
  const auto& pk = p.p_key_given_x();
  for (std::size_t x = 0; x < NX; ++x)
    for (std::size_t u = 0; u < NU; ++u)
      for (std::size_t v = 0; v < NV; ++v) {
        const double a = p.p_v_given_x()[x * NV + v] * p.p_u_given_v()[v * NU + u];
        if (a == 0.0) continue;
        // Sum over keys of P_A(key | x) P_A(u, v | x, key); only key(u, v) is nonzero.
        const double pkx = pk[x * NK + p.key_of(u, v)];
        const double w = pkx * (a / pkx);
        for (std::size_t y = 0; y < NY; ++y)
          for (std::size_t z = 0; z < NZ; ++z)
            out[(((x * NY + y) * NZ + z) * NU + u) * NV + v] = pxyz[(x * NY + y) * NZ + z] * w;
      }
  return out;
}

double tv_protocols(const ProtocolPair& p) {
  const std::size_t NX = p.x_count(), NK = p.key_count();
  const double unif = 1.0 / double(NK);
  // Extended accumulators keep this within rounding of the brute-force sum.
  long double tv = 0.0L;
  for (std::size_t x = 0; x < NX; ++x) {
    long double s = 0.0L;
    for (std::size_t k = 0; k < NK; ++k) s += std::fabs(p.p_key_given_x()[x * NK + k] - unif);
    tv += p.p_x()[x] * s;
  }
  return static_cast<double>(tv);
}

double full_space_tv(const ProtocolPair& p, EncoderRule rule) {
  const std::size_t NX = p.x_count(), NY = p.y_count(), NZ = p.z_count(), NU = p.u_count(),
                    NV = p.v_count(), NK = p.key_count();
  check_table(NX * NY * NZ, NU * NV * NK, "full-space enumeration");
  const auto pxyz = detail::source_sequences(p);
  const auto& r = p.realization();
  const auto& pvx = p.p_v_given_x();
  const auto& puv = p.p_u_given_v();
  const auto& cfg = p.config();
  const std::uint64_t F1 = cfg.f1_bins(), K = cfg.k_bins(), KP = cfg.kp_bins(), F2 = cfg.f2_bins();

  // Encoder table enc[u][v][key] for one x^n, built by direct normalisation.
  std::vector<double> enc(NU * NV * NK);
  long double tv = 0.0L;
  for (std::size_t x = 0; x < NX; ++x) {
    std::fill(enc.begin(), enc.end(), 0.0);
    for (std::uint64_t f1 = 0; f1 < F1; ++f1)
      for (std::uint64_t k = 0; k < K; ++k)
        for (std::uint64_t kp = 0; kp < KP; ++kp)
          for (std::uint64_t f2 = 0; f2 < F2; ++f2) {
            const std::size_t key = p.key_index(f1, k, kp, f2);
            auto v_match = [&](std::size_t v) { return r.f1[v] == f1 && r.k[v] == k && r.kp[v] == kp; };
            if (rule == EncoderRule::kExactPosterior) {
              double z = 0.0;
              for (std::size_t u = 0; u < NU; ++u)
                for (std::size_t v = 0; v < NV; ++v)
                  if (v_match(v) && r.f2[u] == f2) z += pvx[x * NV + v] * puv[v * NU + u];
              for (std::size_t u = 0; u < NU; ++u)
                for (std::size_t v = 0; v < NV; ++v) {
                  double e;
                  if (z == 0.0) {
                    e = 1.0 / double(NU * NV);
                  } else {
                    e = (v_match(v) && r.f2[u] == f2) ? pvx[x * NV + v] * puv[v * NU + u] / z : 0.0;
                  }
                  enc[(u * NV + v) * NK + key] = e;
                }
            } else {
              double zv = 0.0;
              for (std::size_t v = 0; v < NV; ++v)
                if (v_match(v)) zv += pvx[x * NV + v];
              for (std::size_t v = 0; v < NV; ++v) {
                const double pv = zv == 0.0 ? 1.0 / double(NV) : (v_match(v) ? pvx[x * NV + v] / zv : 0.0);
                if (pv == 0.0) continue;
                double zu = 0.0;
                for (std::size_t u = 0; u < NU; ++u)
                  if (r.f2[u] == f2) zu += puv[v * NU + u];
                for (std::size_t u = 0; u < NU; ++u) {
                  const double pu = zu == 0.0 ? 1.0 / double(NU) : (r.f2[u] == f2 ? puv[v * NU + u] / zu : 0.0);
                  enc[(u * NV + v) * NK + key] = pv * pu;
                }
              }
            }
          }
    for (std::size_t y = 0; y < NY; ++y)
      for (std::size_t z = 0; z < NZ; ++z) {
        const double s = pxyz[(x * NY + y) * NZ + z];
        for (std::size_t u = 0; u < NU; ++u)
          for (std::size_t v = 0; v < NV; ++v) {
            const std::size_t own = p.key_of(u, v);
            const double a = s * pvx[x * NV + v] * puv[v * NU + u];
            for (std::size_t key = 0; key < NK; ++key) {
              const double pa = key == own ? a : 0.0;
              const double pb = s * enc[(u * NV + v) * NK + key] / double(NK);
              tv += std::fabs(pa - pb);
            }
          }
      }
  }
  return static_cast<double>(tv);
}

double security_gap(const ProtocolPair& p) {
  const std::size_t NX = p.x_count(), NU = p.u_count(), NV = p.v_count();
  const auto& cfg = p.config();
  const std::size_t M1 = cfg.m1_bins(), F1 = cfg.f1_bins();
  check_table(M1, F1, "security-gap table");
  const auto& r = p.realization();
  std::vector<double> t(M1 * F1);
  const double cells = double(M1 * F1);
  double gap = 0.0;
  for (std::size_t x = 0; x < NX; ++x) {
    const double px = p.p_x()[x];
    if (px == 0.0) continue;
    for (std::size_t u = 0; u < NU; ++u) {
      std::fill(t.begin(), t.end(), 0.0);
      // Z factors out: both terms carry p(z^n | x^n).
      double pxu = 0.0;
      for (std::size_t v = 0; v < NV; ++v) {
        const double a = p.p_v_given_x()[x * NV + v] * p.p_u_given_v()[v * NU + u];
        t[r.m1[v] * F1 + r.f1[v]] += a;
        pxu += a;
      }
      double s = 0.0;
      for (double c : t) s += std::fabs(c - pxu / cells);
      gap += px * s;
    }
  }
  return gap;
}

}  // namespace equiregion
