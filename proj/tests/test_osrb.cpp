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

#include "doctest.h"
#include "equiregion/osrb.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace equiregion;
using fixtures::ThreadsEnv;

namespace {

// V = (X + Bern(q), fair bit), U = first component of V + Bern(qu).
SchemeParams wide_scheme(const JointDist& src, double q, double qu) {
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  return make_scheme(src, d, {{(1 - q) / 2, (1 - q) / 2, q / 2, q / 2}, {q / 2, q / 2, (1 - q) / 2, (1 - q) / 2}},
                     {{1 - qu, qu}, {1 - qu, qu}, {qu, 1 - qu}, {qu, 1 - qu}});
}

BinningConfig rates(int n, double r1, double r2, double rt1, double rt2, double r0) {
  BinningConfig c;
  c.n = n;
  c.r1 = r1;
  c.r2 = r2;
  c.rt1 = rt1;
  c.rt2 = rt2;
  c.r0 = r0;
  return c;
}

struct Means {
  double tv = 0, gap = 0, err = 0, equiv = 0;
};

Means average(const JointDist& src, const SchemeParams& s, BinningConfig c, int n, int seeds) {
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  c.n = n;
  Means m;
  for (int seed = 0; seed < seeds; ++seed) {
    const ProtocolPair p = build_protocols(src, s, c, std::uint64_t(seed));
    m.tv += tv_protocols(p);
    m.gap += security_gap(p);
    const auto f = finite_n_performance(p, d);
    m.err += f.decode_error_a;
    m.equiv += f.equivocation;
  }
  m.tv /= seeds;
  m.gap /= seeds;
  m.err /= seeds;
  m.equiv /= seeds;
  return m;
}

// i.i.d. product over (x, y, z, u, v) by per-letter digits, [x][y][z][u][v].
std::vector<double> iid_product(const JointDist& src, const SchemeParams& s, int n) {
  const std::size_t nx = 2, ny = 2, nz = 2, nv = s.v_card(), nu = s.u_card();
  auto pw = [](std::size_t b, int e) {
    std::size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
  };
  const std::size_t NX = pw(nx, n), NY = pw(ny, n), NZ = pw(nz, n), NU = pw(nu, n), NV = pw(nv, n);
  std::vector<double> out(NX * NY * NZ * NU * NV);
  auto digit = [n](std::size_t s_, std::size_t k, int i) {
    for (int j = n - 1; j > i; --j) s_ /= k;
    return s_ % k;
  };
  for (std::size_t x = 0; x < NX; ++x)
    for (std::size_t y = 0; y < NY; ++y)
      for (std::size_t z = 0; z < NZ; ++z)
        for (std::size_t u = 0; u < NU; ++u)
          for (std::size_t v = 0; v < NV; ++v) {
            double w = 1.0;
            for (int i = 0; i < n; ++i) {
              const std::size_t a = digit(x, nx, i), b = digit(y, ny, i), c = digit(z, nz, i),
                                e = digit(u, nu, i), f = digit(v, nv, i);
              w *= src.at({a, b, c}) * s.vx(a, f) * s.uv(f, e);
            }
            out[(((x * NY + y) * NZ + z) * NU + u) * NV + v] = w;
          }
  return out;
}

}  // namespace

TEST_CASE("bin counts follow 2^floor(n R) with at least one bin") {
  CHECK(BinningConfig::bins(4, 0.75) == 8);
  CHECK(BinningConfig::bins(2, 0.3) == 1);
  CHECK(BinningConfig::bins(3, 0.0) == 1);
  CHECK(BinningConfig::bins(3, 1.0 / 3.0) == 2);
  BinningConfig bad;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), ProbError);
  bad.n = 2;
  bad.r1 = -0.1;
  CHECK_THROWS_AS(bad.validate(), ProbError);
}

TEST_CASE("realizations are seeded, total and in range") {
  const BinningConfig c = rates(2, 1.0, 0.5, 0.5, 0.5, 1.0);
  const auto a = BinningRealization::draw(c, 16, 4, 42), b = BinningRealization::draw(c, 16, 4, 42);
  CHECK(a.m1 == b.m1);
  CHECK(a.k == b.k);
  CHECK(a.m2 == b.m2);
  REQUIRE(a.m1.size() == 16);
  REQUIRE(a.f2.size() == 4);
  for (std::size_t v = 0; v < 16; ++v) {
    CHECK(a.m1[v] < 4);
    CHECK(a.f1[v] < 2);
    CHECK(a.k[v] < 4);
    CHECK(a.kp[v] == 0);
  }
  const auto c2 = BinningRealization::draw(c, 16, 4, 43);
  CHECK((c2.m1 != a.m1 || c2.k != a.k));
}

TEST_CASE("rate feasibility: Shannon cipher") {
  const JointDist src = fixtures::lone_bit();
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  const SchemeParams s = make_scheme(src, d, fixtures::identity_rows(2), fixtures::constant_rows(2));
  BinningConfig c = rates(1, 1.1, 0.0, 0.0, 0.0, 1.1);
  const RateReport ok = rate_feasibility(src, s, c);
  CHECK(ok.entropies.i_xv_given_yu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ok.entropies.i_xv_given_y == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ok.final_pair);
  CHECK(ok.witness.has_value());

  c.r0 = 0.5;
  const RateReport bad = rate_feasibility(src, s, c);
  CHECK_FALSE(bad.final_pair);
  CHECK_FALSE(bad.key_condition);
  CHECK(bad.rate_condition);
  CHECK_FALSE(bad.witness.has_value());
}

TEST_CASE("rate feasibility: lattice witness agrees with the eliminated pair") {
  std::mt19937_64 rng(505);
  int agree = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const JointDist src = fixtures::random_source(rng, 2, 2, 2);
    const std::size_t nv = 2 + rng() % 2, nu = 1 + rng() % 2;
    const auto d = DistortionMeasure::hamming(src.variables()[0]);
    const SchemeParams s = make_scheme(src, d, fixtures::random_rows(rng, 2, nv), fixtures::random_rows(rng, nv, nu));
    const RateEntropies e = RateEntropies::of(src, s);
    auto away = [&](double thr) {
      const double m = 0.08 + 0.5 * fixtures::unif(rng);
      return std::max(0.0, (rng() & 1) ? thr + m : thr - m);
    };
    const double R = away(e.i_xv_given_y), R0 = away(e.i_xv_given_yu);
    const bool pair = R0 > e.i_xv_given_yu && R > e.i_xv_given_y;
    agree += pair == scan_rate_polytope(e, R, R0).has_value();
  }
  CHECK(agree == trials);
}

TEST_CASE("key regime selector") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.3);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  const SchemeParams same = make_scheme(src, d, fixtures::bsc_rows(0.1), fixtures::identity_rows(2));
  const KeyRegime a = key_regime_selector(src, same, 0.1);
  CHECK(std::fabs(a.threshold) <= 1e-12);
  CHECK(a.tag == KeyRegimeTag::kHigh);

  const JointDist lone = fixtures::lone_bit();
  const SchemeParams cipher = make_scheme(lone, d, fixtures::identity_rows(2), fixtures::constant_rows(2));
  const KeyRegime b = key_regime_selector(lone, cipher, 0.5);
  CHECK(b.threshold == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.tag == KeyRegimeTag::kLow);

  const SchemeParams bsc = make_scheme(src, d, fixtures::bsc_rows(0.1), fixtures::bsc_rows(0.2));
  const auto j = oracle::compose({src.mass().begin(), src.mass().end()}, 2, 2, 2, fixtures::bsc_rows(0.1),
                                 fixtures::bsc_rows(0.2));
  const double thr = oracle::I(j, {oracle::X}, {oracle::V}, {oracle::Y, oracle::U});
  CHECK(std::fabs(key_regime_selector(src, bsc, 0.0).threshold - thr) <= 1e-10);
}

TEST_CASE("single-bin binning at n = 1 leaves the protocols identical") {
  const JointDist src = fixtures::dsbs(0.4, 0.1, 0.3);
  const SchemeParams s = wide_scheme(src, 0.1, 0.05);
  const ProtocolPair p = build_protocols(src, s, rates(1, 0, 0, 0, 0, 0), std::uint64_t{9});
  CHECK(p.key_count() == 1);
  CHECK(tv_protocols(p) <= 1e-15);
  CHECK(full_space_tv(p) <= 1e-15);
  CHECK(security_gap(p) <= 1e-15);
  const auto marg = protocol_a_sequence_marginal(p);
  const auto iid = iid_product(src, s, 1);
  REQUIRE(marg.size() == iid.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < iid.size(); ++i) worst = std::max(worst, std::fabs(marg[i] - iid[i]));
  CHECK(worst <= 1e-15);
}

TEST_CASE("protocol tables are normalised") {
  const JointDist src = fixtures::dsbs(0.5, 0.2, 0.3);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  const SchemeParams s = make_scheme(src, d, fixtures::bsc_rows(0.2), fixtures::bsc_rows(0.1));
  const ProtocolPair p = build_protocols(src, s, rates(2, 0.5, 0.5, 0.5, 0.5, 0.5), std::uint64_t{3});
  double total = 0.0;
  for (double v : protocol_a_sequence_marginal(p)) total += v;
  CHECK(std::fabs(total - 1.0) <= 1e-12);
  for (std::size_t x = 0; x < p.x_count(); ++x) {
    double row = 0.0;
    for (std::size_t k = 0; k < p.key_count(); ++k) row += p.p_key_given_x()[x * p.key_count() + k];
    CHECK(std::fabs(row - 1.0) <= 1e-12);
  }
}

TEST_CASE("Protocol A sequence marginal is the i.i.d. product") {
  const JointDist src = fixtures::dsbs(0.3, 0.15, 0.25);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  const SchemeParams s = make_scheme(src, d, fixtures::bsc_rows(0.2), fixtures::bsc_rows(0.1));
  for (int n : {1, 2, 4}) {
    const ProtocolPair p = build_protocols(src, s, rates(n, 0.5, 0.5, 0.25, 0.25, 0.5), std::uint64_t(n));
    const auto marg = protocol_a_sequence_marginal(p);
    const auto iid = iid_product(src, s, n);
    REQUIRE(marg.size() == iid.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < iid.size(); ++i) worst = std::max(worst, std::fabs(marg[i] - iid[i]));
    CHECK(worst <= 1e-15);
  }
}

TEST_CASE("reduced-marginal TV equals full-space TV") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.4);
  const SchemeParams s = wide_scheme(src, 0.1, 0.05);
  for (int n : {1, 2})
    for (std::uint64_t seed : {1u, 2u, 3u})
      for (const auto& c : {rates(n, 0.5, 0.75, 0, 0, 1), rates(n, 0.5, 0.5, 0.5, 0.5, 0.5),
                            rates(n, 1, 1, 1, 1, 1.5)}) {
        const ProtocolPair p = build_protocols(src, s, c, seed);
        const double reduced = tv_protocols(p), full = full_space_tv(p);
        CHECK(reduced >= 0.0);
        CHECK(reduced <= 2.0);
        CHECK(std::fabs(reduced - full) <= 1e-12);
      }
}

TEST_CASE("the literal factored encoder breaks the reduction identity") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.4);
  const SchemeParams s = wide_scheme(src, 0.1, 0.05);
  double gap = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProtocolPair p = build_protocols(src, s, rates(2, 0.5, 0.5, 0.5, 0.5, 0.5), seed);
    gap = std::max(gap, full_space_tv(p, EncoderRule::kFactored) - tv_protocols(p));
  }
  CHECK(gap > 1e-3);
}

TEST_CASE("security gap") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.4);
  const SchemeParams s = wide_scheme(src, 0.1, 0.05);
  // Nothing binned at the first level.
  CHECK(security_gap(build_protocols(src, s, rates(2, 0, 0.75, 0, 0.5, 1), std::uint64_t{4})) <= 1e-15);
  // Constraint-violating first-level rate stays clearly above the compliant one.
  const Means ok = average(src, s, rates(4, 0.5, 0.75, 0, 0, 1), 4, 20);
  const Means bad = average(src, s, rates(4, 1.5, 0.75, 0, 0, 1), 4, 20);
  CHECK(ok.gap >= 0.0);
  CHECK(bad.gap <= 2.0);
  CHECK(bad.gap > ok.gap + 0.2);
}

TEST_CASE("decoder: unambiguous and tied inputs") {
  // Y = X, V = X: the side information pins v^n.
  const JointDist y_is_x({fixtures::bin("X"), fixtures::bin("Y"), fixtures::none("Z")}, {0.4, 0.0, 0.0, 0.6});
  const auto d = DistortionMeasure::hamming(y_is_x.variables()[0]);
  const SchemeParams s = make_scheme(y_is_x, d, fixtures::identity_rows(2), fixtures::constant_rows(2));
  const ProtocolPair p = build_protocols(y_is_x, s, rates(3, 0, 0, 0, 0, 0), std::uint64_t{1});
  for (std::size_t y = 0; y < p.y_count(); ++y) {
    const DecodeOutcome o = sw_decode(p, y, 0, 0, 0, 0, 0);
    CHECK(o.ok);
    CHECK(o.v == y);
    CHECK(o.u == 0);
  }
  const auto perf = finite_n_performance(p, d);
  CHECK(perf.distortion == 0.0);
  CHECK(perf.decode_error_a <= 1e-15);

  // Uniform X, no side information, one bin: both symbols tie, the smaller wins.
  const JointDist lone = fixtures::lone_bit();
  const SchemeParams c = make_scheme(lone, d, fixtures::identity_rows(2), fixtures::constant_rows(2));
  const ProtocolPair q = build_protocols(lone, c, rates(1, 0, 0, 0, 0, 0), std::uint64_t{1});
  const DecodeOutcome t = sw_decode(q, 0, 0, 0, 0, 0, 0);
  CHECK(t.ok);
  CHECK(t.v == 0);
  CHECK_THROWS_AS(sw_decode(q, 0, 1, 0, 0, 0, 0), ProbError);
}

TEST_CASE("no message leaves H(X|Z) per symbol") {
  const JointDist src = fixtures::dsbs(0.3, 0.2, 0.25);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  const SchemeParams s = make_scheme(src, d, fixtures::bsc_rows(0.1), fixtures::bsc_rows(0.2));
  const double hxz = cond_entropy(src, {"X"}, {"Z"});
  for (int n : {1, 2, 3}) {
    const auto perf = finite_n_performance(build_protocols(src, s, rates(n, 0, 0, 0, 0, 0.7), std::uint64_t(n)), d);
    CHECK(perf.equivocation == doctest::Approx(hxz).epsilon(1e-12));
  }
}

TEST_CASE("feasible configuration: trends from n = 2 to n = 4") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.4);
  const SchemeParams s = wide_scheme(src, 0.1, 0.05);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  const BinningConfig c = rates(2, 0.5, 0.75, 0, 0, 1);
  REQUIRE(rate_feasibility(src, s, c).all_seven);
  const Means m2 = average(src, s, c, 2, 20), m4 = average(src, s, c, 4, 20);
  CHECK(m4.tv < m2.tv);
  CHECK(m4.gap < m2.gap);
  CHECK(m4.err < m2.err);
  // Equivocation sits between the asymptotic value and H(X|Z), drifting down.
  const double target = evaluate_bounds(src, s, d, c.r0).equiv_max;
  const double hxz = cond_entropy(src, {"X"}, {"Z"});
  CHECK(m4.equiv >= target - 0.5);
  CHECK(m4.equiv <= hxz + 1e-12);
  CHECK(std::fabs(m4.equiv - target) < std::fabs(m2.equiv - target));

  // Larger message rates: low block error at n = 4.
  const BinningConfig wide = rates(2, 1, 1, 0, 0, 1);
  REQUIRE(rate_feasibility(src, s, wide).all_seven);
  const Means w2 = average(src, s, wide, 2, 100), w4 = average(src, s, wide, 4, 100);
  CHECK(w4.err < 0.2);
  CHECK(w4.err < w2.err);
}

TEST_CASE("enumeration budget") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.4);
  const SchemeParams s = wide_scheme(src, 0.1, 0.05);
  CHECK_NOTHROW(build_protocols(src, s, rates(4, 0, 0, 0, 0, 0), std::uint64_t{0}));
  CHECK_THROWS_AS(build_protocols(src, s, rates(5, 0, 0, 0, 0, 0), std::uint64_t{0}), EnumerationBudgetError);
}

TEST_CASE("performance is independent of the worker count") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.4);
  const SchemeParams s = wide_scheme(src, 0.1, 0.05);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  const ProtocolPair p = build_protocols(src, s, rates(4, 0.5, 0.75, 0.25, 0.25, 1), std::uint64_t{11});
  FiniteNPerformance a, b;
  {
    ThreadsEnv env("1");
    a = finite_n_performance(p, d);
  }
  {
    ThreadsEnv env("3");
    b = finite_n_performance(p, d);
  }
  CHECK(a.distortion == b.distortion);
  CHECK(a.equivocation == b.equivocation);
  CHECK(a.decode_error_a == b.decode_error_a);
  CHECK(a.decode_error_b == b.decode_error_b);
}
