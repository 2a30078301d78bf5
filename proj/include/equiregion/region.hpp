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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "equiregion/prob.hpp"

namespace equiregion {

// Achievability comparisons are closed: >= / <= with this slack.
inline constexpr double kAchieveSlack = 1e-9;

// Deterministic decoder map xhat(y, v), stored y-major.
struct ReconMap {
  std::size_t y_size = 0;
  std::size_t v_size = 0;
  std::vector<std::size_t> table;

  std::size_t operator()(std::size_t y, std::size_t v) const { return table[y * v_size + v]; }
  friend bool operator==(const ReconMap&, const ReconMap&) = default;
};

struct SchemeParams {
  CondChannel vx;  // X -> V
  CondChannel uv;  // V -> U
  ReconMap recon;

  std::size_t v_card() const { return vx.cols(); }
  std::size_t u_card() const { return uv.cols(); }
};

// Builds a scheme with alphabets V = {0..}, U = {0..} and the optimal decoder.
SchemeParams make_scheme(const JointDist& source, const DistortionMeasure& d,
                         const std::vector<std::vector<double>>& vx_rows,
                         const std::vector<std::vector<double>>& uv_rows);

struct RegionPoint {
  double rate = 0.0;
  double key_rate = 0.0;
  double distortion = 0.0;
  double equivocation = 0.0;
};

struct BoundDiagnostics {
  double i_xv_given_y = 0.0;
  double i_yv_given_u = 0.0;
  double i_zv_given_u = 0.0;
  double h_x_given_zv = 0.0;
  double h_x_given_zu = 0.0;
};

struct BoundEvaluation {
  double rate_min = 0.0;
  double equiv_max = 0.0;
  double distortion = 0.0;
  BoundDiagnostics diag;
};

struct SearchConfig {
  int grid = 8;                 // simplex step 1/grid
  int refine_iters = 4;         // step halvings after the grid phase
  bool exhaustive = false;      // force full enumeration of both channels
  std::size_t u_card = 2;
  std::size_t v_card = 0;       // 0 means |X|
  std::size_t inner_exhaustive_limit = 4096;  // p(u|v) grid sizes above this use local ascent
  std::size_t outer_limit = std::size_t{1} << 18;  // p(v|x) grids above this are sampled
  std::size_t outer_samples = 20000;
  std::size_t restarts = 4;     // random starts per p(v|x) for the ascent
  std::uint64_t seed = 0;
  std::optional<CondChannel> pinned_vx;
  std::vector<SchemeParams> warm_starts;  // extra candidates, checked after the grid
};

enum class SearchStatus { kOk, kInfeasible };

struct EquivocationResult {
  SearchStatus status = SearchStatus::kInfeasible;
  double equivocation = 0.0;       // equals bounds.equiv_max
  double grid_equivocation = 0.0;  // best quantized-grid value before refinement
  std::optional<SchemeParams> scheme;
  BoundEvaluation bounds;
  std::uint64_t evaluations = 0;
};

BoundEvaluation evaluate_bounds(const JointDist& source, const SchemeParams& scheme,
                                const DistortionMeasure& d, double key_rate);

ReconMap optimal_reconstruction(const JointDist& source, const CondChannel& vx,
                                const DistortionMeasure& d);

// True when the scheme's bounds cover the point (closed comparisons).
bool scheme_covers(const JointDist& source, const SchemeParams& scheme, const DistortionMeasure& d,
                   const RegionPoint& point);

EquivocationResult max_equivocation(const JointDist& source, const DistortionMeasure& d,
                                    double rate_cap, double key_rate, double dist_cap,
                                    const SearchConfig& search);

enum class SweepAxis { kKeyRate, kRateCap, kDistCap };

struct SweepSpec {
  double key_rate = 0.0;
  double rate_cap = 0.0;
  double dist_cap = 0.0;
  SweepAxis axis = SweepAxis::kKeyRate;
  std::vector<double> grid;  // strictly increasing values of the swept quantity
};

struct SweepRow {
  double key_rate = 0.0;
  double rate_cap = 0.0;
  double dist_cap = 0.0;
  SearchStatus status = SearchStatus::kInfeasible;
  RegionPoint point;  // achieved rate, key rate, achieved distortion, equivocation
  std::optional<SchemeParams> scheme;
};

// One optimisation per grid value, then every winner is re-scored at every
// grid value and the best feasible one kept. Pooling makes the output an
// exact envelope over a common scheme set, so monotonicity in the swept cap
// and the unit slope bound in key rate hold without tolerance games.
std::vector<SweepRow> region_sweep(const JointDist& source, const DistortionMeasure& d,
                                   const SweepSpec& spec, const SearchConfig& search);

struct AchievabilityResult {
  bool achievable = false;
  std::optional<SchemeParams> witness;
};

AchievabilityResult is_achievable(const JointDist& source, const DistortionMeasure& d,
                                  const RegionPoint& point, const SearchConfig& search);

enum class CardinalityAxis { kU, kV };

struct SaturationReport {
  CardinalityAxis axis = CardinalityAxis::kU;
  std::size_t small_card = 0;
  std::size_t large_card = 0;
  std::vector<double> small_values;  // per sweep point; NaN when infeasible
  std::vector<double> large_values;
  double max_improvement = 0.0;
};

// Paired sweeps at card and card+1. The larger run is seeded with the
// smaller run's winners embedded in the bigger alphabet.
SaturationReport cardinality_saturation_check(const JointDist& source, const DistortionMeasure& d,
                                              const SweepSpec& caps, CardinalityAxis axis,
                                              std::size_t small_card, const SearchConfig& search);

// Equivocation versus key rate for one fixed layered scheme. Key bits first
// pad the V layer (slope 1 up to I(X;V|Y,U)), then buy nothing for
// [I(Z;U) - I(Y;U)]^+ bits while the eavesdropper can still decode U, then
// pad U (slope 1) up to H(X|Z). Pointwise this is the better of the scheme
// itself and the same V with U collapsed to a constant. The optimised
// boundary is concave in R0, so flat-then-rising shapes only show up here.
struct KeyRateProfile {
  double v_layer_key = 0.0;  // I(X;V|Y,U)
  double dead_bits = 0.0;    // [I(Z;U) - I(Y;U)]^+
  double h_x_given_zu = 0.0;
  double h_x_given_z = 0.0;
  std::vector<double> key_rates;
  std::vector<double> equivocation;
};

KeyRateProfile layered_key_profile(const JointDist& source, const SchemeParams& scheme,
                                   const DistortionMeasure& d, const std::vector<double>& key_rates);

// Embeds a scheme into larger auxiliary alphabets by adding unused symbols.
SchemeParams embed_scheme(const JointDist& source, const DistortionMeasure& d,
                          const SchemeParams& scheme, std::size_t v_card, std::size_t u_card);

}  // namespace equiregion
