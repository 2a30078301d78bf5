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
#include <random>

#include "equiregion/osrb.hpp"

namespace equiregion {

namespace {

constexpr int kMaxBinBits = 31;

int bin_bits(int n, double rate) {
  // The epsilon keeps rates like 0.75 at n = 4 from flooring to 2.
  const double e = std::floor(n * rate + 1e-9);
  return e < 0.0 ? 0 : static_cast<int>(std::min(e, 1e6));
}

void check_rate(double r, const char* name) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ProbError(std::string(name) + " must be finite and non-negative");
}

RateConstraint make(const char* name, const char* rel, double lhs, double rhs, bool upper) {
  RateConstraint c;
  c.name = name;
  c.relation = rel;
  c.lhs = lhs;
  c.rhs = rhs;
  c.upper = upper;
  c.slack = upper ? rhs - lhs : lhs - rhs;
  c.holds = c.slack > 0.0;
  return c;
}

}  // namespace

std::uint64_t BinningConfig::bins(int n, double rate) {
  const int b = bin_bits(n, rate);
  if (b > kMaxBinBits) throw EnumerationBudgetError("bin count exceeds 2^31");
  return std::uint64_t{1} << b;
}

void BinningConfig::validate() const {
  if (n < 1) throw ProbError("blocklength n must be >= 1");
  check_rate(r1, "r1");
  check_rate(r2, "r2");
  check_rate(rt1, "rt1");
  check_rate(rt2, "rt2");
  check_rate(r0, "r0");
  check_rate(r0_public, "r0_public");
  for (double r : {r1, r2, rt1, rt2, r0, r0_public})
    if (bin_bits(n, r) > kMaxBinBits) throw EnumerationBudgetError("bin count exceeds 2^31");
}

BinningRealization BinningRealization::draw(const BinningConfig& cfg, std::size_t v_sequences,
                                            std::size_t u_sequences, std::uint64_t seed) {
  cfg.validate();
  BinningRealization r;
  r.seed = seed;
  std::mt19937_64 rng(seed);
  // Bin counts are powers of two, so masking the raw output is uniform.
  const std::uint64_t mm1 = cfg.m1_bins() - 1, mf1 = cfg.f1_bins() - 1, mk = cfg.k_bins() - 1,
                      mkp = cfg.kp_bins() - 1, mm2 = cfg.m2_bins() - 1, mf2 = cfg.f2_bins() - 1;
  r.m1.resize(v_sequences);
  r.f1.resize(v_sequences);
  r.k.resize(v_sequences);
  r.kp.resize(v_sequences);
  for (std::size_t v = 0; v < v_sequences; ++v) {
    r.m1[v] = static_cast<std::uint32_t>(rng() & mm1);
    r.f1[v] = static_cast<std::uint32_t>(rng() & mf1);
    r.k[v] = static_cast<std::uint32_t>(rng() & mk);
    r.kp[v] = static_cast<std::uint32_t>(rng() & mkp);
  }
  r.m2.resize(u_sequences);
  r.f2.resize(u_sequences);
  for (std::size_t u = 0; u < u_sequences; ++u) {
    r.m2[u] = static_cast<std::uint32_t>(rng() & mm2);
    r.f2[u] = static_cast<std::uint32_t>(rng() & mf2);
  }
  return r;
}

RateEntropies RateEntropies::of(const JointDist& source, const SchemeParams& scheme) {
  if (source.rank() != 3) throw ProbError("source must be a joint over (X, Y, Z)");
  const JointDist j = compose(source, scheme.vx, scheme.uv);
  const auto& vars = source.variables();
  const std::string X = vars[0].name(), Y = vars[1].name(), Z = vars[2].name();
  const std::string V = scheme.vx.to_vars()[0].name(), U = scheme.uv.to_vars()[0].name();
  RateEntropies e;
  e.h_v_given_x = cond_entropy(j, {V}, {X, Y, Z});
  e.h_u_given_x = cond_entropy(j, {U}, {X, Y, Z});
  e.h_uv_given_x = cond_entropy(j, {U, V}, {X, Y, Z});
  e.h_v_given_yu = cond_entropy(j, {V}, {Y, U});
  e.h_u_given_v = cond_entropy(j, {U}, {Y, V});
  e.h_uv_given_y = cond_entropy(j, {U, V}, {Y});
  e.h_v_given_xu = cond_entropy(j, {V}, {X, Z, U});
  e.i_xv_given_yu = cond_mutual_info(j, {X}, {V}, {Y, U});
  e.i_xv_given_y = cond_mutual_info(j, {X}, {V}, {Y});
  return e;
}

std::optional<RateWitness> scan_rate_polytope(const RateEntropies& e, double rate, double key_rate,
                                              double step) {
  if (!(step > 0.0)) throw ProbError("scan step must be positive");
  if (!(rate >= 0.0) || !(key_rate >= 0.0)) return std::nullopt;
  const long j_max = static_cast<long>(std::floor(rate / step + 1e-9));
  for (long j = 0; j <= j_max; ++j) {
    const double r1 = std::min(j * step, rate);
    const double r2 = rate - r1;
    // Bounds on R~1 from the constraints that involve it alone.
    const double lo1 = e.h_v_given_yu - key_rate - r1;
    const double hi1 = std::min(e.h_v_given_x - key_rate, e.h_v_given_xu - r1);
    if (!(lo1 < hi1)) continue;
    for (long i = static_cast<long>(std::floor(lo1 / step)); i * step < hi1; ++i) {
      const double rt1 = i * step;
      if (!(rt1 > lo1)) continue;
      const double lo2 = std::max(e.h_u_given_v - r2, e.h_uv_given_y - key_rate - r1 - r2 - rt1);
      const double hi2 = std::min(e.h_u_given_x, e.h_uv_given_x - key_rate - rt1);
      if (!(lo2 < hi2)) continue;
      long m = static_cast<long>(std::floor(lo2 / step));
      while (!(m * step > lo2)) ++m;
      if (m * step < hi2) return RateWitness{r1, r2, rt1, m * step};
    }
  }
  return std::nullopt;
}

RateReport rate_feasibility(const JointDist& source, const SchemeParams& scheme, const BinningConfig& cfg,
                            double step) {
  cfg.validate();
  RateReport r;
  const RateEntropies& e = r.entropies = RateEntropies::of(source, scheme);
  const double R0 = cfg.r0, R1 = cfg.r1, R2 = cfg.r2, T1 = cfg.rt1, T2 = cfg.rt2;
  r.constraints = {
      make("indep_v", "R0 + R~1 < H(V|X)", R0 + T1, e.h_v_given_x, true),
      make("indep_u", "R~2 < H(U|X)", T2, e.h_u_given_x, true),
      make("indep_uv", "R0 + R~1 + R~2 < H(U,V|X)", R0 + T1 + T2, e.h_uv_given_x, true),
      make("sw_v", "R0 + R1 + R~1 > H(V|Y,U)", R0 + R1 + T1, e.h_v_given_yu, false),
      make("sw_u", "R2 + R~2 > H(U|V)", R2 + T2, e.h_u_given_v, false),
      make("sw_uv", "R0 + R1 + R2 + R~1 + R~2 > H(U,V|Y)", R0 + R1 + R2 + T1 + T2, e.h_uv_given_y, false),
      make("secrecy", "R1 + R~1 < H(V|X,U)", R1 + T1, e.h_v_given_xu, true),
  };
  r.all_seven = true;
  for (const auto& c : r.constraints) r.all_seven = r.all_seven && c.holds;
  r.rate = R1 + R2;
  r.key_condition = R0 > e.i_xv_given_yu;
  r.rate_condition = r.rate > e.i_xv_given_y;
  r.final_pair = r.key_condition && r.rate_condition;
  r.witness = scan_rate_polytope(e, r.rate, R0, step);
  return r;
}

const char* to_string(KeyRegimeTag t) { return t == KeyRegimeTag::kHigh ? "HIGH" : "LOW"; }

KeyRegime key_regime_selector(const JointDist& source, const SchemeParams& scheme, double key_rate) {
  check_rate(key_rate, "key rate");
  const JointDist j = compose(source, scheme.vx, scheme.uv);
  const auto& vars = source.variables();
  KeyRegime k;
  k.threshold = cond_mutual_info(j, {vars[0].name()}, {scheme.vx.to_vars()[0].name()},
                                 {vars[1].name(), scheme.uv.to_vars()[0].name()});
  k.tag = key_rate > k.threshold ? KeyRegimeTag::kHigh : KeyRegimeTag::kLow;
  return k;
}

}  // namespace equiregion
