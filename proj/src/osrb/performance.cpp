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
#include <unordered_map>

#include "equiregion/osrb.hpp"
#include "equiregion/parallel.hpp"
#include "sequences.hpp"

namespace equiregion {

namespace {

constexpr std::size_t kTableLimit = std::size_t{1} << 26;

// Packs every index the decoder sees besides y^n.
struct Packer {
  explicit Packer(const BinningConfig& c)
      : f1(c.f1_bins()), k(c.k_bins()), kp(c.kp_bins()), m2(c.m2_bins()), f2(c.f2_bins()) {}

  std::uint64_t operator()(std::uint64_t m1_, std::uint64_t f1_, std::uint64_t k_, std::uint64_t kp_,
                           std::uint64_t m2_, std::uint64_t f2_) const {
    return ((((m1_ * f1 + f1_) * k + k_) * kp + kp_) * m2 + m2_) * f2 + f2_;
  }

  std::uint64_t f1, k, kp, m2, f2;
};

struct Entry {
  double w;
  std::uint32_t u, v;
};

using DecoderMap = std::unordered_map<std::uint64_t, Entry>;

// MAP table for one y^n. Returns the total Protocol A mass of y^n.
double build_decoder(const ProtocolPair& p, const Packer& pack, std::size_t y, DecoderMap& map) {
  const auto& r = p.realization();
  const std::size_t NU = p.u_count(), NV = p.v_count();
  map.clear();
  double total = 0.0;
  // u outer, v inner with strict improvement: ties keep the smallest (u, v).
  for (std::size_t u = 0; u < NU; ++u)
    for (std::size_t v = 0; v < NV; ++v) {
      const double w = p.p_yv()[y * NV + v] * p.p_u_given_v()[v * NU + u];
      if (w <= 0.0) continue;
      total += w;
      const std::uint64_t key = pack(r.m1[v], r.f1[v], r.k[v], r.kp[v], r.m2[u], r.f2[u]);
      auto [it, fresh] = map.try_emplace(key, Entry{w, std::uint32_t(u), std::uint32_t(v)});
      if (!fresh && w > it->second.w) it->second = Entry{w, std::uint32_t(u), std::uint32_t(v)};
    }
  return total;
}

struct KeyParts {
  std::uint64_t f1, k, kp, f2;
};

KeyParts split_key(const BinningConfig& c, std::size_t key) {
  KeyParts s;
  s.f2 = key % c.f2_bins();
  key /= c.f2_bins();
  s.kp = key % c.kp_bins();
  key /= c.kp_bins();
  s.k = key % c.k_bins();
  s.f1 = key / c.k_bins();
  return s;
}

struct Partial {
  double dist = 0.0, err_a = 0.0, err_b = 0.0, fail_b = 0.0;
};

}  // namespace

DecodeOutcome sw_decode(const ProtocolPair& p, std::size_t y, std::uint64_t m1, std::uint64_t m2,
                        std::uint64_t f1, std::uint64_t f2, std::uint64_t k, std::uint64_t kp) {
  const auto& c = p.config();
  if (y >= p.y_count() || m1 >= c.m1_bins() || m2 >= c.m2_bins() || f1 >= c.f1_bins() || f2 >= c.f2_bins() ||
      k >= c.k_bins() || kp >= c.kp_bins())
    throw ProbError("decoder input out of range");
  const auto& r = p.realization();
  const std::size_t NU = p.u_count(), NV = p.v_count();
  DecodeOutcome out;
  double best = 0.0;
  for (std::size_t u = 0; u < NU; ++u) {
    if (r.m2[u] != m2 || r.f2[u] != f2) continue;
    for (std::size_t v = 0; v < NV; ++v) {
      if (r.m1[v] != m1 || r.f1[v] != f1 || r.k[v] != k || r.kp[v] != kp) continue;
      const double w = p.p_yv()[y * NV + v] * p.p_u_given_v()[v * NU + u];
      if (w > best) {
        best = w;
        out = {true, u, v};
      }
    }
  }
  return out;
}

FiniteNPerformance finite_n_performance(const ProtocolPair& p, const DistortionMeasure& d) {
  const auto& cfg = p.config();
  const auto& r = p.realization();
  const int n = p.n();
  const std::size_t NX = p.x_count(), NY = p.y_count(), NZ = p.z_count(), NU = p.u_count(), NV = p.v_count(),
                    NK = p.key_count();
  const std::size_t M1 = cfg.m1_bins(), M2 = cfg.m2_bins(), F1 = cfg.f1_bins(), F2 = cfg.f2_bins(),
                    KP = cfg.kp_bins();
  if (d.source_alphabet().size() != p.letters_x()) throw ProbError("distortion source alphabet != |X|");
  const std::size_t S = M1 * M2 * F1 * F2 * KP;
  if (S > kTableLimit / NZ) throw EnumerationBudgetError("eavesdropper view table exceeds the enumeration budget");
  const Packer pack(cfg);

  // Per-letter cost d(x, xhat(y, v)) and sequence digits.
  const std::size_t nx = p.letters_x(), ny = p.letters_y(), nv = p.letters_v();
  std::vector<double> cost(nx * ny * nv);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t v = 0; v < nv; ++v) cost[(x * ny + y) * nv + v] = d(x, p.scheme().recon(y, v));
  const auto dx = detail::digits(nx, n), dy = detail::digits(ny, n), dv = detail::digits(nv, n);
  auto seq_cost = [&](std::size_t x, std::size_t y, std::size_t v) {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += cost[(dx[x * n + i] * ny + dy[y * n + i]) * nv + dv[v * n + i]];
    return c;
  };

  // Bin occupancy, used for the uniform fallback on zero-mass keys.
  std::vector<double> cnt1(M1, 0.0), cnt2(M2, 0.0);
  for (std::size_t v = 0; v < NV; ++v) cnt1[r.m1[v]] += 1.0;
  for (std::size_t u = 0; u < NU; ++u) cnt2[r.m2[u]] += 1.0;
  const double uv_count = double(NU) * double(NV);
  std::vector<std::vector<std::size_t>> zero_keys(NX);
  for (std::size_t x = 0; x < NX; ++x)
    for (std::size_t k = 0; k < NK; ++k)
      if (p.p_key_given_x()[x * NK + k] == 0.0) zero_keys[x].push_back(k);

  // Decoding and distortion, sharded over y^n.
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(NY, 64));
  std::vector<Partial> part(shards);
  for_each_shard(NY, shards, [&](std::size_t s, std::size_t b, std::size_t e) {
    DecoderMap map;
    Partial acc;
    for (std::size_t y = b; y < e; ++y) {
      const double total = build_decoder(p, pack, y, map);
      double hit = 0.0;
      for (const auto& kv : map) hit += kv.second.w;
      acc.err_a += total - hit;

      for (std::size_t x = 0; x < NX; ++x) {
        const double pxy = p.p_xy()[x * NY + y];
        if (pxy == 0.0) continue;
        const double base = pxy / double(NK);
        for (std::size_t v = 0; v < NV; ++v) {
          const double a = p.p_v_given_x()[x * NV + v];
          if (a == 0.0) continue;
          for (std::size_t u = 0; u < NU; ++u) {
            const double c = p.p_u_given_v()[v * NU + u];
            if (c == 0.0) continue;
            const double mass = base * (a * c / p.p_key_given_x()[x * NK + p.key_of(u, v)]);
            const auto it = map.find(pack(r.m1[v], r.f1[v], r.k[v], r.kp[v], r.m2[u], r.f2[u]));
            if (it == map.end()) {
              acc.fail_b += mass;
              acc.err_b += mass;
              acc.dist += mass * seq_cost(x, y, 0);
            } else {
              if (it->second.u != u || it->second.v != v) acc.err_b += mass;
              acc.dist += mass * seq_cost(x, y, it->second.v);
            }
          }
        }
        // Zero-mass keys: (u^n, v^n) uniform, grouped by the messages they produce.
        for (std::size_t key : zero_keys[x]) {
          const KeyParts kp = split_key(cfg, key);
          for (std::size_t m1 = 0; m1 < M1; ++m1) {
            if (cnt1[m1] == 0.0) continue;
            for (std::size_t m2 = 0; m2 < M2; ++m2) {
              if (cnt2[m2] == 0.0) continue;
              const double mass = base * cnt1[m1] * cnt2[m2] / uv_count;
              const auto it = map.find(pack(m1, kp.f1, kp.k, kp.kp, m2, kp.f2));
              if (it == map.end()) {
                acc.fail_b += mass;
                acc.err_b += mass;
                acc.dist += mass * seq_cost(x, y, 0);
              } else {
                // Exactly one pair of the group is the decoded one.
                acc.err_b += mass - base / uv_count;
                acc.dist += mass * seq_cost(x, y, it->second.v);
              }
            }
          }
        }
      }
    }
    part[s] = acc;
  });

  FiniteNPerformance out;
  for (const auto& a : part) {
    out.distortion += a.dist;
    out.decode_error_a += a.err_a;
    out.decode_error_b += a.err_b;
    out.decode_failure_b += a.fail_b;
  }
  out.distortion /= n;
  out.zero_key_mass = p.zero_key_mass();

  // Eavesdropper view (m1, m2, f1, f2, k') under P_B: for each x^n a table c_x.
  // H(X,Z,view) = H(X,Z) + sum_x p(x) H(c_x) since Z is independent of the view given X.
  auto view = [&](std::uint64_t m1, std::uint64_t m2, std::uint64_t f1, std::uint64_t f2, std::uint64_t kp) {
    return (((m1 * M2 + m2) * F1 + f1) * F2 + f2) * KP + kp;
  };
  std::vector<double> c(S), q(NZ * S, 0.0);
  double h_cond = 0.0;
  for (std::size_t x = 0; x < NX; ++x) {
    const double px = p.p_x()[x];
    if (px == 0.0) continue;
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t v = 0; v < NV; ++v) {
      const double a = p.p_v_given_x()[x * NV + v];
      if (a == 0.0) continue;
      for (std::size_t u = 0; u < NU; ++u) {
        const double b = p.p_u_given_v()[v * NU + u];
        if (b == 0.0) continue;
        c[view(r.m1[v], r.m2[u], r.f1[v], r.f2[u], r.kp[v])] +=
            (a * b / p.p_key_given_x()[x * NK + p.key_of(u, v)]) / double(NK);
      }
    }
    for (std::size_t key : zero_keys[x]) {
      const KeyParts kp = split_key(cfg, key);
      for (std::size_t m1 = 0; m1 < M1; ++m1)
        for (std::size_t m2 = 0; m2 < M2; ++m2)
          c[view(m1, m2, kp.f1, kp.f2, kp.kp)] += cnt1[m1] * cnt2[m2] / uv_count / double(NK);
    }
    h_cond += px * entropy_of(c);
    for (std::size_t z = 0; z < NZ; ++z) {
      const double pxz = p.p_xz()[x * NZ + z];
      if (pxz == 0.0) continue;
      double* row = q.data() + z * S;
      for (std::size_t s = 0; s < S; ++s) row[s] += pxz * c[s];
    }
  }
  const double h = entropy_of(p.p_xz()) + h_cond - entropy_of(q);
  out.equivocation = std::max(0.0, h) / n;
  return out;
}

}  // namespace equiregion
