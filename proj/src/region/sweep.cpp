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

struct Caps {
  double key_rate, rate_cap, dist_cap;
};

Caps caps_at(const SweepSpec& spec, double value) {
  Caps c{spec.key_rate, spec.rate_cap, spec.dist_cap};
  switch (spec.axis) {
    case SweepAxis::kKeyRate:
      c.key_rate = value;
      break;
    case SweepAxis::kRateCap:
      c.rate_cap = value;
      break;
    case SweepAxis::kDistCap:
      c.dist_cap = value;
      break;
  }
  return c;
}

}  // namespace

std::vector<SweepRow> region_sweep(const JointDist& source, const DistortionMeasure& d,
                                   const SweepSpec& spec, const SearchConfig& search) {
  if (spec.grid.empty()) throw ProbError("sweep grid is empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i)
    if (!(spec.grid[i] > spec.grid[i - 1])) throw ProbError("sweep grid must be strictly increasing");

  std::vector<SchemeParams> pool;
  for (double g : spec.grid) {
    const Caps c = caps_at(spec, g);
    EquivocationResult r = max_equivocation(source, d, c.rate_cap, c.key_rate, c.dist_cap, search);
    if (r.status == SearchStatus::kOk) pool.push_back(std::move(*r.scheme));
  }

  std::vector<SweepRow> rows;
  for (double g : spec.grid) {
    const Caps c = caps_at(spec, g);
    SweepRow row{c.key_rate, c.rate_cap, c.dist_cap, SearchStatus::kInfeasible, {}, std::nullopt};
    std::size_t pick = pool.size();
    BoundEvaluation pick_b;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const BoundEvaluation b = evaluate_bounds(source, pool[i], d, c.key_rate);
      if (b.rate_min > c.rate_cap + kAchieveSlack || b.distortion > c.dist_cap + kAchieveSlack) continue;
      // Order: larger equivocation, then smaller rate, then smaller distortion.
      bool take = pick == pool.size() || b.equiv_max > pick_b.equiv_max;
      if (!take && b.equiv_max == pick_b.equiv_max) {
        take = b.rate_min < pick_b.rate_min ||
               (b.rate_min == pick_b.rate_min && b.distortion < pick_b.distortion);
      }
      if (take) {
        pick = i;
        pick_b = b;
      }
    }
    if (pick < pool.size()) {
      row.status = SearchStatus::kOk;
      row.point = RegionPoint{pick_b.rate_min, c.key_rate, pick_b.distortion, pick_b.equiv_max};
      row.scheme = pool[pick];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

AchievabilityResult is_achievable(const JointDist& source, const DistortionMeasure& d,
                                  const RegionPoint& point, const SearchConfig& search) {
  for (double v : {point.rate, point.key_rate, point.distortion, point.equivocation})
    if (!std::isfinite(v)) throw ProbError("region point fields must be finite");
  AchievabilityResult out;
  if (point.rate < 0.0 || point.key_rate < 0.0 || point.distortion < 0.0) return out;
  EquivocationResult r =
      max_equivocation(source, d, point.rate, point.key_rate, point.distortion, search);
  if (r.status != SearchStatus::kOk) return out;
  if (r.equivocation + kAchieveSlack >= point.equivocation) {
    out.achievable = true;
    out.witness = std::move(r.scheme);
  }
  return out;
}

SaturationReport cardinality_saturation_check(const JointDist& source, const DistortionMeasure& d,
                                              const SweepSpec& caps, CardinalityAxis axis,
                                              std::size_t small_card, const SearchConfig& search) {
  const std::size_t nx = source.variables()[0].size();
  SaturationReport rep;
  rep.axis = axis;
  rep.small_card = small_card;
  rep.large_card = small_card + 1;

  SearchConfig small = search;
  SearchConfig large = search;
  const std::size_t base_v = search.v_card ? search.v_card : nx;
  if (axis == CardinalityAxis::kU) {
    small.u_card = small_card;
    large.u_card = small_card + 1;
  } else {
    small.v_card = small_card;
    large.v_card = small_card + 1;
  }
  const auto small_rows = region_sweep(source, d, caps, small);
  for (const auto& r : small_rows) {
    if (!r.scheme) continue;
    const std::size_t v = axis == CardinalityAxis::kV ? small_card + 1 : base_v;
    const std::size_t u = axis == CardinalityAxis::kU ? small_card + 1 : search.u_card;
    large.warm_starts.push_back(embed_scheme(source, d, *r.scheme, v, u));
  }
  const auto large_rows = region_sweep(source, d, caps, large);

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < small_rows.size(); ++i) {
    const double a = small_rows[i].status == SearchStatus::kOk ? small_rows[i].point.equivocation : kNaN;
    const double b = large_rows[i].status == SearchStatus::kOk ? large_rows[i].point.equivocation : kNaN;
    rep.small_values.push_back(a);
    rep.large_values.push_back(b);
    if (!std::isnan(b)) {
      const double gain = std::isnan(a) ? std::numeric_limits<double>::infinity() : b - a;
      rep.max_improvement = std::max(rep.max_improvement, gain);
    }
  }
  return rep;
}

KeyRateProfile layered_key_profile(const JointDist& source, const SchemeParams& scheme,
                                   const DistortionMeasure& d, const std::vector<double>& key_rates) {
  SchemeParams flat = scheme;
  flat.uv = CondChannel::constant(scheme.uv.from_vars()[0], scheme.uv.to_vars()[0]);

  const JointDist j = compose(source, scheme.vx, scheme.uv);
  const auto& vars = source.variables();
  const std::string X = vars[0].name(), Y = vars[1].name(), Z = vars[2].name();
  const std::string V = scheme.vx.to_vars()[0].name(), U = scheme.uv.to_vars()[0].name();
  KeyRateProfile p;
  p.v_layer_key = cond_mutual_info(j, {X}, {V}, {Y, U});
  p.dead_bits = std::max(0.0, mutual_info(j, {Z}, {U}) - mutual_info(j, {Y}, {U}));
  p.h_x_given_zu = cond_entropy(j, {X}, {Z, U});
  p.h_x_given_z = cond_entropy(j, {X}, {Z});
  p.key_rates = key_rates;
  for (double r0 : key_rates)
    p.equivocation.push_back(std::max(evaluate_bounds(source, scheme, d, r0).equiv_max,
                                      evaluate_bounds(source, flat, d, r0).equiv_max));
  return p;
}

}  // namespace equiregion
