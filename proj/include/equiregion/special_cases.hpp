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

#include <cstdint>
#include <vector>

#include "equiregion/prob.hpp"
#include "equiregion/region.hpp"

namespace equiregion {

// Four equal expressions for the equivocation term when U -> V -> X -> (Y,Z).
struct LemmaTriple {
  double form_a = 0.0;  // I(Y;V|U) - I(Z;V|U) + H(X|Z,V)
  double form_b = 0.0;  // H(X|Z,U) - I(X;V|Y,U)
  double form_c = 0.0;  // H(X|Z) - I(X;V|Y) + I(Z;U) - I(Y;U)
  double form_d = 0.0;  // H(X|Y,V) + I(X;Y|U) - I(X;Z|U), diagnostic

  double spread() const;      // over a, b, c
  double spread_all() const;  // over all four
};

// Joint must carry variables named U, V, X, Y, Z (any order).
LemmaTriple lemma1_identities(const JointDist& joint);

struct IdentitySuiteReport {
  std::size_t trials = 0;
  double worst_spread = 0.0;
  std::size_t worst_trial = 0;
};

// Seeded random sources and channels with alphabets of size 2..4, composed
// into U, V, X, Y, Z joints. With `break_markov` the five-variable joint is
// drawn directly instead, so the chain fails (negative control).
IdentitySuiteReport identity_suite(std::size_t trials, std::uint64_t seed, bool break_markov = false);

// Exhaustive simplex-grid search over the corollary's own auxiliaries,
// followed by optional halving-step refinement. Grids larger than
// `budget` are refused rather than sampled.
struct CorollarySearch {
  int grid = 8;
  int refine_iters = 4;
  std::size_t u_card = 2;
  std::size_t v_card = 0;  // no-key only; 0 means |X|
  std::uint64_t budget = 20'000'000;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorollaryResult {
  SearchStatus status = SearchStatus::kInfeasible;
  double rate_min = 0.0;
  double equivocation = 0.0;
  double distortion = 0.0;
  // Winning channels, row-major: {p(u|x)} | {p(v|x), p(u|v)} | {p(xhat,u|x)}.
  std::vector<std::vector<std::vector<double>>> channels;
  std::uint64_t evaluations = 0;
};

// Hamming distortion, D = 0. Rate floor H(X|Y); search over p(u|x).
CorollaryResult lossless_region(const JointDist& source, double key_rate, const CorollarySearch& search);

// R0 = 0. Equivocation I(Y;V|U) - I(Z;V|U) + H(X|Z,V) under rate/distortion caps.
CorollaryResult no_key_region(const JointDist& source, const DistortionMeasure& d, double rate_cap,
                              double dist_cap, const CorollarySearch& search);

// |Y| = 1. Search over p(xhat,u|x); rate I(X;Xhat,U).
CorollaryResult no_si_region(const JointDist& source, const DistortionMeasure& d, double key_rate,
                             double rate_cap, double dist_cap, const CorollarySearch& search);

// Corollary value next to the general search restricted the same way.
struct CrossCheck {
  CorollaryResult corollary;
  EquivocationResult general;
  double abs_diff = 0.0;  // infinity when exactly one side is infeasible
};

CrossCheck cross_check_lossless(const JointDist& source, double key_rate, const CorollarySearch& cs,
                                SearchConfig general);
CrossCheck cross_check_no_key(const JointDist& source, const DistortionMeasure& d, double rate_cap,
                              double dist_cap, const CorollarySearch& cs, SearchConfig general);
CrossCheck cross_check_no_si(const JointDist& source, const DistortionMeasure& d, double key_rate,
                             double rate_cap, double dist_cap, const CorollarySearch& cs,
                             SearchConfig general);

}  // namespace equiregion
