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

// Exact small-blocklength evaluation of the random-binning construction.
//
// Protocol A: (x,y,z,u,v) i.i.d. from p(x,y,z)p(v|x)p(u|v); v^n is binned
// into (m1, f1, k, k'), u^n into (m2, f2). Protocol B: (f1, f2, k, k') uniform,
// encoder draws (u^n, v^n) from the Protocol A posterior given x^n and those
// indices. The decoder is MAP over bin-consistent (u^n, v^n) given y^n.
//
// k' is the publicly revealed key part used when the key rate alone is
// below I(X;V|Y,U); it is binned like k but also given to the eavesdropper.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "equiregion/prob.hpp"
#include "equiregion/region.hpp"

namespace equiregion {

// Raised when exact enumeration would exceed its size limits.
class EnumerationBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSequenceBudgetBits = 24.0;

struct BinningConfig {
  int n = 1;
  double r1 = 0.0, r2 = 0.0;    // message rates
  double rt1 = 0.0, rt2 = 0.0;  // common-randomness rates
  double r0 = 0.0;              // secret key
  double r0_public = 0.0;       // revealed key part k'

  // 2^floor(n * rate), at least 1.
  static std::uint64_t bins(int n, double rate);
  std::uint64_t m1_bins() const { return bins(n, r1); }
  std::uint64_t m2_bins() const { return bins(n, r2); }
  std::uint64_t f1_bins() const { return bins(n, rt1); }
  std::uint64_t f2_bins() const { return bins(n, rt2); }
  std::uint64_t k_bins() const { return bins(n, r0); }
  std::uint64_t kp_bins() const { return bins(n, r0_public); }

  void validate() const;  // throws ProbError
};

// Index maps for every v^n and u^n (sequence index: first letter most significant).
struct BinningRealization {
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> m1, f1, k, kp;  // by v^n
  std::vector<std::uint32_t> m2, f2;          // by u^n

  // Each index drawn uniformly from one mt19937_64 stream: per v^n in order
  // (m1, f1, k, k'), then per u^n in order (m2, f2).
  static BinningRealization draw(const BinningConfig& cfg, std::size_t v_sequences,
                                 std::size_t u_sequences, std::uint64_t seed);
};

// ---- rate feasibility ----

// Single-letter entropies entering the seven binning constraints.
struct RateEntropies {
  double h_v_given_x = 0.0;     // H(V|X,Y,Z)
  double h_u_given_x = 0.0;     // H(U|X,Y,Z)
  double h_uv_given_x = 0.0;    // H(U,V|X,Y,Z)
  double h_v_given_yu = 0.0;    // H(V|Y,U)
  double h_u_given_v = 0.0;     // H(U|Y,V)
  double h_uv_given_y = 0.0;    // H(U,V|Y)
  double h_v_given_xu = 0.0;    // H(V|X,Z,U)
  double i_xv_given_yu = 0.0;
  double i_xv_given_y = 0.0;

  static RateEntropies of(const JointDist& source, const SchemeParams& scheme);
};

struct RateConstraint {
  std::string name;
  std::string relation;  // human-readable inequality
  double lhs = 0.0;
  double rhs = 0.0;
  bool upper = true;     // lhs < rhs when true, lhs > rhs otherwise
  double slack = 0.0;    // positive when strictly satisfied
  bool holds = false;
};

struct RateWitness {
  double r1 = 0.0, r2 = 0.0, rt1 = 0.0, rt2 = 0.0;
};

struct RateReport {
  RateEntropies entropies;
  std::array<RateConstraint, 7> constraints;  // at the configured rates
  bool all_seven = false;
  double rate = 0.0;      // r1 + r2
  bool key_condition = false;   // R0 > I(X;V|Y,U)
  bool rate_condition = false;  // R > I(X;V|Y)
  bool final_pair = false;
  std::optional<RateWitness> witness;  // lattice point of the seven constraints at (R, R0)
};

// Evaluates the seven constraints at the configured rates, the eliminated
// pair, and scans for a witness on the `step` lattice.
RateReport rate_feasibility(const JointDist& source, const SchemeParams& scheme, const BinningConfig& cfg,
                            double step = 0.01);

// Lattice scan of the seven-constraint polytope at total rate R and key rate R0.
// R1 runs over multiples of step in [0, R] with R2 = R - R1; R~1, R~2 over
// all (signed) multiples of step.
std::optional<RateWitness> scan_rate_polytope(const RateEntropies& e, double rate, double key_rate,
                                              double step = 0.01);

// ---- key regime ----

enum class KeyRegimeTag { kHigh, kLow };

struct KeyRegime {
  KeyRegimeTag tag = KeyRegimeTag::kLow;
  double threshold = 0.0;  // I(X;V|Y,U)
};

KeyRegime key_regime_selector(const JointDist& source, const SchemeParams& scheme, double key_rate);
const char* to_string(KeyRegimeTag t);

// ---- protocols ----

// Both protocol distributions for one realization, stored factored: sequence
// tensors for the source and channels, the bin maps, and P_A(key | x^n) with
// key = (f1, k, k', f2).
class ProtocolPair {
 public:
  const BinningConfig& config() const { return cfg_; }
  const BinningRealization& realization() const { return real_; }
  int n() const { return cfg_.n; }

  std::size_t x_count() const { return nxs_; }
  std::size_t y_count() const { return nys_; }
  std::size_t z_count() const { return nzs_; }
  std::size_t v_count() const { return nvs_; }
  std::size_t u_count() const { return nus_; }
  std::size_t key_count() const { return nkey_; }

  // Sequence tensors, row-major.
  const std::vector<double>& p_xy() const { return pxy_; }     // [x^n][y^n]
  const std::vector<double>& p_xz() const { return pxz_; }     // [x^n][z^n]
  const std::vector<double>& source_letters() const { return src1_; }  // single-letter p(x,y,z)
  const std::vector<double>& p_x() const { return px_; }
  const std::vector<double>& p_v_given_x() const { return pvx_; }  // [x^n][v^n]
  const std::vector<double>& p_u_given_v() const { return puv_; }  // [v^n][u^n]
  const std::vector<double>& p_yv() const { return pyv_; }         // [y^n][v^n]
  const std::vector<double>& p_key_given_x() const { return pkey_; }  // [x^n][key]

  std::size_t key_of(std::size_t u, std::size_t v) const {
    return ((static_cast<std::size_t>(real_.f1[v]) * kb_ + real_.k[v]) * kpb_ + real_.kp[v]) * f2b_ +
           real_.f2[u];
  }
  std::size_t key_index(std::uint64_t f1, std::uint64_t k, std::uint64_t kp, std::uint64_t f2) const {
    return ((f1 * kb_ + k) * kpb_ + kp) * f2b_ + f2;
  }

  // Protocol B mass placed on zero-probability keys (uniform fallback).
  double zero_key_mass() const { return zero_mass_; }

  const SchemeParams& scheme() const { return scheme_; }
  std::size_t letters_x() const { return nx_; }
  std::size_t letters_y() const { return ny_; }
  std::size_t letters_z() const { return nz_; }
  std::size_t letters_v() const { return nv_; }
  std::size_t letters_u() const { return nu_; }

 private:
  friend ProtocolPair build_protocols(const JointDist&, const SchemeParams&, const BinningConfig&,
                                      const BinningRealization&);
  ProtocolPair(SchemeParams s) : scheme_(std::move(s)) {}

  SchemeParams scheme_;
  BinningConfig cfg_;
  BinningRealization real_;
  std::size_t nx_ = 0, ny_ = 0, nz_ = 0, nv_ = 0, nu_ = 0;
  std::size_t nxs_ = 0, nys_ = 0, nzs_ = 0, nvs_ = 0, nus_ = 0;
  std::uint64_t kb_ = 1, kpb_ = 1, f2b_ = 1;
  std::size_t nkey_ = 1;
  std::vector<double> src1_, pxy_, pxz_, px_, pvx_, puv_, pyv_, pkey_;
  double zero_mass_ = 0.0;
};

// Requires n * sum(log2 |alphabet|) over X, Y, Z, U, V <= 24.
ProtocolPair build_protocols(const JointDist& source, const SchemeParams& scheme, const BinningConfig& cfg,
                             const BinningRealization& realization);

// Convenience: draw the realization from `seed` and build.
ProtocolPair build_protocols(const JointDist& source, const SchemeParams& scheme, const BinningConfig& cfg,
                             std::uint64_t seed);

// Protocol A marginal over (x^n, y^n, z^n, u^n, v^n), obtained by summing the
// factored joint over every bin index. Stored [x][y][z][u][v].
std::vector<double> protocol_a_sequence_marginal(const ProtocolPair& pair);

struct DecodeOutcome {
  bool ok = false;  // false: no bin-consistent pair with positive weight
  std::size_t u = 0;
  std::size_t v = 0;
};

// MAP over (u^n, v^n) consistent with all bin values; ties go to the
// lexicographically smallest (u^n, v^n).
DecodeOutcome sw_decode(const ProtocolPair& pair, std::size_t y, std::uint64_t m1, std::uint64_t m2,
                        std::uint64_t f1, std::uint64_t f2, std::uint64_t k, std::uint64_t kp = 0);

// || P_A - P_B ||_1 on the (x^n, y^n, z^n, f1, f2, k, k') marginal.
double tv_protocols(const ProtocolPair& pair);

enum class EncoderRule {
  kExactPosterior,  // P_A(u,v | x, f1, f2, k, k')
  kFactored,        // P_A(v | x, f1, k, k') P_A(u | v, f2)
};

// || P_A - P_B ||_1 over the full (x, y, z, u, v, f1, f2, k, k') space by
// brute force. Messages and decoder outputs are deterministic functions of
// these and do not change the distance. Small blocklengths only.
double full_space_tv(const ProtocolPair& pair, EncoderRule rule = EncoderRule::kExactPosterior);

// || P_A(x, z, u, m1, f1) - p(x, z, u) 2^-n(R1 + R~1) ||_1.
double security_gap(const ProtocolPair& pair);

struct FiniteNPerformance {
  double distortion = 0.0;        // E_B d(X^n, Xhat^n) / n
  double equivocation = 0.0;      // H(X^n | Z^n, M1, M2, F1, F2, K') / n under P_B
  double decode_error_a = 0.0;    // Pr_A[(Uhat, Vhat) != (U, V)]
  double decode_error_b = 0.0;    // same under P_B
  double decode_failure_b = 0.0;  // Pr_B[no consistent pair]
  double zero_key_mass = 0.0;
};

FiniteNPerformance finite_n_performance(const ProtocolPair& pair, const DistortionMeasure& d);

}  // namespace equiregion
