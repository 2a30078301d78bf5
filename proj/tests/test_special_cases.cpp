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
#include "equiregion/special_cases.hpp"
#include "support/fixtures.hpp"

using namespace equiregion;
using fixtures::ThreadsEnv;

namespace {

// X, Y arbitrary and Z a copy of Y.
JointDist z_copies_y(std::mt19937_64& rng, std::size_t nx, std::size_t ny) {
  const auto p = fixtures::random_pmf(rng, nx * ny);
  std::vector<double> m(nx * ny * ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) m[(x * ny + y) * ny + y] = p[x * ny + y];
  return JointDist({Alphabet::indexed("X", nx), Alphabet::indexed("Y", ny), Alphabet::indexed("Z", ny)}, m);
}

JointDist composed(const JointDist& src, const std::vector<std::vector<double>>& vx,
                   const std::vector<std::vector<double>>& uv) {
  const Alphabet V = Alphabet::indexed("V", vx[0].size()), U = Alphabet::indexed("U", uv[0].size());
  return compose(src, CondChannel::from_rows(src.variables()[0], V, vx), CondChannel::from_rows(V, U, uv));
}

// X uniform, Y = X + Bern(e), Z empty.
JointDist decoder_si_only(double e) {
  return JointDist({fixtures::bin("X"), fixtures::bin("Y"), fixtures::none("Z")},
                   {0.5 * (1 - e), 0.5 * e, 0.5 * e, 0.5 * (1 - e)});
}

}  // namespace

TEST_CASE("lemma identities: U = V = X with Z = Y gives zero") {
  std::mt19937_64 rng(3);
  const JointDist src = z_copies_y(rng, 3, 2);
  const LemmaTriple t = lemma1_identities(composed(src, fixtures::identity_rows(3), fixtures::identity_rows(3)));
  CHECK(std::fabs(t.form_a) <= 1e-12);
  CHECK(std::fabs(t.form_b) <= 1e-12);
  CHECK(std::fabs(t.form_c) <= 1e-12);
  CHECK(std::fabs(t.form_d) <= 1e-12);
}

TEST_CASE("lemma identities: constant auxiliaries give H(X|Z)") {
  const JointDist src = fixtures::dsbs(0.3, 0.2, 0.35);
  const double hxz = cond_entropy(src, {"X"}, {"Z"});
  const LemmaTriple t = lemma1_identities(composed(src, fixtures::constant_rows(2, 2), fixtures::constant_rows(2, 3)));
  CHECK(t.form_a == doctest::Approx(hxz).epsilon(1e-12));
  CHECK(t.form_b == doctest::Approx(hxz).epsilon(1e-12));
  CHECK(t.form_c == doctest::Approx(hxz).epsilon(1e-12));
  CHECK(t.form_d == doctest::Approx(hxz).epsilon(1e-12));
}

TEST_CASE("lemma identities: 200 random composed joints") {
  std::mt19937_64 rng(20260);
  double worst = 0.0, worst_all = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nx = 2 + rng() % 2, ny = 1 + rng() % 3, nz = 1 + rng() % 3;
    const std::size_t nv = 1 + rng() % 4, nu = 1 + rng() % 3;
    const bool sparse = trial % 3 == 0;
    const JointDist src = fixtures::random_source(rng, nx, ny, nz, sparse);
    const LemmaTriple t = lemma1_identities(
        composed(src, fixtures::random_rows(rng, nx, nv, sparse), fixtures::random_rows(rng, nv, nu, sparse)));
    worst = std::max(worst, t.spread());
    worst_all = std::max(worst_all, t.spread_all());
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_all <= 1e-10);
}

TEST_CASE("lemma identities: rejects joints without the five names") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.2);
  CHECK_THROWS_AS(lemma1_identities(src), ProbError);
  const JointDist renamed({Alphabet::indexed("A", 2), Alphabet::indexed("Y", 2), Alphabet::indexed("Z", 2)},
                          std::vector<double>(src.mass().begin(), src.mass().end()));
  CHECK_THROWS_AS(lemma1_identities(composed(renamed, fixtures::bsc_rows(0.1), fixtures::bsc_rows(0.2))),
                  ProbError);
}

TEST_CASE("lossless: identical side informations give min{R0, H(X|Z)}") {
  std::mt19937_64 rng(11);
  const JointDist src = z_copies_y(rng, 2, 2);
  const double hxz = cond_entropy(src, {"X"}, {"Z"});
  for (double r0 : {0.0, 0.2, 0.5, 1.5}) {
    const CorollaryResult r = lossless_region(src, r0, CorollarySearch{});
    REQUIRE(r.status == SearchStatus::kOk);
    CHECK(r.equivocation == doctest::Approx(std::min(r0, hxz)).epsilon(1e-9));
  }
}

TEST_CASE("lossless: rate floor is H(X|Y) exactly") {
  const JointDist src = fixtures::dsbs(0.4, 0.15, 0.3);
  CHECK(lossless_region(src, 0.1, CorollarySearch{}).rate_min == cond_entropy(src, {"X"}, {"Y"}));
  // Decoder sees the source.
  const JointDist y_is_x({fixtures::bin("X"), fixtures::bin("Y"), fixtures::none("Z")}, {0.3, 0.0, 0.0, 0.7});
  CHECK(lossless_region(y_is_x, 0.0, CorollarySearch{}).rate_min == 0.0);
}

TEST_CASE("lossless: agrees with the general search pinned at V = X") {
  std::vector<JointDist> sources = {decoder_si_only(0.25), fixtures::dsbs(0.5, 0.3, 0.1),
                                    fixtures::dsbs(0.35, 0.1, 0.25)};
  std::mt19937_64 rng(5);
  sources.push_back(fixtures::random_source(rng, 3, 2, 2));
  for (const auto& src : sources)
    for (double r0 : {0.0, 0.15, 0.4}) {
      const CrossCheck c = cross_check_lossless(src, r0, CorollarySearch{}, SearchConfig{});
      REQUIRE(c.corollary.status == SearchStatus::kOk);
      REQUIRE(c.general.status == SearchStatus::kOk);
      CHECK(c.abs_diff <= 1e-9);
    }
}

TEST_CASE("no key: corollary expression equals the general bound at R0 = 0") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nx = 2 + rng() % 2, nv = 1 + rng() % 3, nu = 1 + rng() % 3;
    const JointDist src = fixtures::random_source(rng, nx, 1 + rng() % 3, 1 + rng() % 3, trial % 2 == 0);
    const auto d = DistortionMeasure::hamming(src.variables()[0]);
    const SchemeParams s =
        make_scheme(src, d, fixtures::random_rows(rng, nx, nv), fixtures::random_rows(rng, nv, nu));
    const BoundEvaluation b = evaluate_bounds(src, s, d, 0.0);
    const LemmaTriple t = lemma1_identities(compose(src, s.vx, s.uv));
    CHECK(std::fabs(b.equiv_max - t.form_a) <= 1e-12);
    CHECK(b.diag.i_yv_given_u - b.diag.i_zv_given_u + b.diag.h_x_given_zv <= b.diag.h_x_given_zu + 1e-12);
  }
}

TEST_CASE("no key: constant V leaves H(X|Z)") {
  const JointDist src = fixtures::dsbs(0.5, 0.2, 0.3);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  CorollarySearch cs;
  cs.v_card = 1;
  const CorollaryResult r = no_key_region(src, d, 1.0, 0.5, cs);
  REQUIRE(r.status == SearchStatus::kOk);
  CHECK(r.equivocation == doctest::Approx(cond_entropy(src, {"X"}, {"Z"})).epsilon(1e-12));
  CHECK(r.rate_min == 0.0);
}

TEST_CASE("no key: agrees with the general search") {
  const JointDist src = fixtures::dsbs(0.5, 0.2, 0.1);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  for (auto [rcap, dcap] : {std::pair{0.3, 0.2}, {0.6, 0.1}, {1.0, 0.0}, {0.2, 0.25}}) {
    const CrossCheck c = cross_check_no_key(src, d, rcap, dcap, CorollarySearch{}, SearchConfig{});
    CHECK(c.corollary.status == c.general.status);
    CHECK(c.abs_diff <= 1e-9);
  }
  // Infeasible on both sides.
  const CrossCheck c = cross_check_no_key(src, d, 0.0, 0.0, CorollarySearch{}, SearchConfig{});
  CHECK(c.corollary.status == SearchStatus::kInfeasible);
  CHECK(c.general.status == SearchStatus::kInfeasible);
}

TEST_CASE("no side information: Shannon cipher") {
  const JointDist src = fixtures::lone_bit(0.5);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  for (double r0 : {0.0, 0.3, 1.0, 1.4}) {
    const CorollaryResult r = no_si_region(src, d, r0, 1.0, 0.0, CorollarySearch{});
    REQUIRE(r.status == SearchStatus::kOk);
    CHECK(r.rate_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.equivocation == doctest::Approx(std::min(r0, 1.0)).epsilon(1e-9));
  }
  CHECK(no_si_region(src, d, 0.5, 0.9, 0.0, CorollarySearch{}).status == SearchStatus::kInfeasible);
}

TEST_CASE("no side information: constant reconstruction leaves H(X|Z,U)") {
  const JointDist src = fixtures::x_and_z(0.4, 0.2);
  const DistortionMeasure one_symbol(src.variables()[0], Alphabet("Xhat", {"*"}), {0.0, 1.0});
  const CorollaryResult r = no_si_region(src, one_symbol, 0.0, 1.0, 1.0, CorollarySearch{});
  REQUIRE(r.status == SearchStatus::kOk);
  CHECK(r.equivocation == doctest::Approx(cond_entropy(src, {"X"}, {"Z"})).epsilon(1e-12));
}

TEST_CASE("no side information: binary sweep agrees with the general module") {
  const JointDist src = fixtures::x_and_z(0.5, 0.3);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  double worst = 0.0;
  // Below 1 - h(0.1) no scheme meets D = 0.1.
  const CrossCheck low = cross_check_no_si(src, d, 0.2, 0.5, 0.1, CorollarySearch{}, SearchConfig{});
  CHECK(low.corollary.status == SearchStatus::kInfeasible);
  CHECK(low.general.status == SearchStatus::kInfeasible);
  // Distortion sweep at full rate, then rate sweep at D = 0.25.
  std::vector<std::pair<double, double>> caps;
  for (double dcap : {0.1, 0.15, 0.2, 0.25, 0.3}) caps.emplace_back(1.0, dcap);
  for (double rcap : {0.3, 0.5, 0.7}) caps.emplace_back(rcap, 0.25);
  for (auto [rcap, dcap] : caps) {
    const CrossCheck c = cross_check_no_si(src, d, 0.2, rcap, dcap, CorollarySearch{}, SearchConfig{});
    REQUIRE(c.corollary.status == SearchStatus::kOk);
    REQUIRE(c.general.status == SearchStatus::kOk);
    worst = std::max(worst, c.abs_diff);
  }
  MESSAGE("max |corollary - general| = " << worst);
  CHECK(worst <= 0.02);
}

TEST_CASE("no side information: validation") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.2);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  CHECK_THROWS_AS(no_si_region(src, d, 0.1, 1.0, 0.1, CorollarySearch{}), ProbError);
}

TEST_CASE("corollary searches refuse grids past the budget") {
  const JointDist src = fixtures::dsbs(0.5, 0.1, 0.2);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  CorollarySearch cs;
  cs.budget = 1000;
  CHECK_THROWS_AS(no_key_region(src, d, 1.0, 0.1, cs), BudgetError);
}

TEST_CASE("corollary searches are independent of the worker count") {
  const JointDist src = fixtures::dsbs(0.4, 0.2, 0.15);
  const auto d = DistortionMeasure::hamming(src.variables()[0]);
  CorollaryResult a, b;
  {
    ThreadsEnv env("1");
    a = no_key_region(src, d, 0.5, 0.15, CorollarySearch{});
  }
  {
    ThreadsEnv env("4");
    b = no_key_region(src, d, 0.5, 0.15, CorollarySearch{});
  }
  CHECK(a.equivocation == b.equivocation);
  CHECK(a.channels == b.channels);
}
