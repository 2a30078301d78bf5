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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "engine.hpp"
#include "equiregion/parallel.hpp"
#include "equiregion/region.hpp"

namespace equiregion {

namespace {

using detail::SimplexGrid;
using detail::SourceTables;
using detail::UEvaluator;
using detail::VLevel;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Refinement only accepts moves that beat the incumbent by this much, so the
// generic re-evaluation can never rank a refined scheme below the grid one.
constexpr double kRefineGain = 1e-9;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Best {
  double value = kNegInf;
  std::vector<double> vx;
  std::vector<double> uv;
};

struct Problem {
  const SourceTables& st;
  std::size_t nx, nv, nu;
  double rate_cap, key_rate, dist_cap;

  bool feasible(const VLevel& v) const {
    return v.rate <= rate_cap + kAchieveSlack && v.distortion <= dist_cap + kAchieveSlack;
  }
};

// Writes the p(v|x) rows encoded by a mixed-radix index (row 0 most significant).
void decode_rows(std::size_t index, const SimplexGrid& g, std::size_t rows, double* out) {
  const std::size_t k = g.dim();
  for (std::size_t r = rows; r-- > 0;) {
    const std::size_t digit = index % g.size();
    index /= g.size();
    std::copy_n(g.point(digit), k, out + r * k);
  }
}

class InnerSearch {
 public:
  InnerSearch(const Problem& p, const SimplexGrid& ug, const SearchConfig& cfg)
      : p_(p), ug_(ug), cfg_(cfg), uv_(p.nv * p.nu) {}

  std::uint64_t evaluations = 0;

  // Best p(u|v) on the grid for this p(v|x); updates `best` on strict gain.
  void run(const VLevel& vl, const std::vector<double>& vx, std::size_t outer_index, bool exhaustive,
           Best& best) {
    if (exhaustive) {
      enumerate(vl, vx, best);
    } else {
      ascend_all(vl, vx, outer_index, best);
    }
  }

  double eval(const VLevel& vl, const double* uv) {
    ++evaluations;
    return ue_.equivocation(p_.st, vl, uv, p_.nu, p_.key_rate);
  }

 private:
  void consider(double val, const std::vector<double>& vx, const double* uv, Best& best) {
    if (val > best.value) {
      best.value = val;
      best.vx = vx;
      best.uv.assign(uv, uv + p_.nv * p_.nu);
    }
  }

  void enumerate(const VLevel& vl, const std::vector<double>& vx, Best& best) {
    const std::size_t nv = p_.nv, nu = p_.nu, m = ug_.size();
    std::vector<std::size_t> digit(nv, 0);
    for (std::size_t r = 0; r < nv; ++r) std::copy_n(ug_.point(0), nu, uv_.data() + r * nu);
    while (true) {
      consider(eval(vl, uv_.data()), vx, uv_.data(), best);
      std::size_t r = nv;
      while (r-- > 0) {
        if (++digit[r] < m) {
          std::copy_n(ug_.point(digit[r]), nu, uv_.data() + r * nu);
          break;
        }
        digit[r] = 0;
        std::copy_n(ug_.point(0), nu, uv_.data() + r * nu);
      }
      if (r == static_cast<std::size_t>(-1)) return;
    }
  }

  // First-improvement coordinate ascent over integer compositions.
  void ascend(const VLevel& vl, const std::vector<double>& vx, std::vector<int>& counts, Best& best) {
    const std::size_t nv = p_.nv, nu = p_.nu;
    const double step = 1.0 / ug_.steps();
    auto load = [&] {
      for (std::size_t i = 0; i < nv * nu; ++i) uv_[i] = counts[i] * step;
    };
    load();
    double cur = eval(vl, uv_.data());
    consider(cur, vx, uv_.data(), best);
    for (int pass = 0; pass < 256; ++pass) {
      bool improved = false;
      for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t a = 0; a < nu; ++a)
          for (std::size_t b = 0; b < nu; ++b) {
            if (a == b || counts[v * nu + a] == 0) continue;
            --counts[v * nu + a];
            ++counts[v * nu + b];
            uv_[v * nu + a] = counts[v * nu + a] * step;
            uv_[v * nu + b] = counts[v * nu + b] * step;
            const double val = eval(vl, uv_.data());
            if (val > cur) {
              cur = val;
              improved = true;
              consider(cur, vx, uv_.data(), best);
            } else {
              ++counts[v * nu + a];
              --counts[v * nu + b];
              uv_[v * nu + a] = counts[v * nu + a] * step;
              uv_[v * nu + b] = counts[v * nu + b] * step;
            }
          }
      if (!improved) break;
    }
  }

  void ascend_all(const VLevel& vl, const std::vector<double>& vx, std::size_t outer_index,
                  Best& best) {
    const std::size_t nv = p_.nv, nu = p_.nu;
    const int g = ug_.steps();
    std::vector<int> counts(nv * nu, 0);
    // Constant U.
    for (std::size_t v = 0; v < nv; ++v) counts[v * nu] = g;
    ascend(vl, vx, counts, best);
    // U as a deterministic relabelling of V.
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t v = 0; v < nv; ++v) counts[v * nu + v % nu] = g;
    ascend(vl, vx, counts, best);
    std::mt19937_64 rng(mix64(cfg_.seed ^ mix64(outer_index)));
    for (std::size_t s = 0; s < cfg_.restarts; ++s) {
      for (std::size_t v = 0; v < nv; ++v) {
        const int* c = ug_.counts(rng() % ug_.size());
        std::copy_n(c, nu, counts.data() + v * nu);
      }
      ascend(vl, vx, counts, best);
    }
  }

  const Problem& p_;
  const SimplexGrid& ug_;
  const SearchConfig& cfg_;
  UEvaluator ue_;
  std::vector<double> uv_;
};

// Continuous mass-transfer moves from the incumbent with halving steps.
void refine(const Problem& p, bool vx_free, int grid, int iters, Best& best, std::uint64_t& evals) {
  VLevel vl;
  UEvaluator ue;
  vl.build(p.st, best.vx, p.nv);
  auto eval = [&](const VLevel& v, const std::vector<double>& uv) {
    ++evals;
    return ue.equivocation(p.st, v, uv.data(), p.nu, p.key_rate);
  };
  double delta = 1.0 / (2.0 * grid);
  for (int it = 0; it < iters; ++it, delta /= 2.0) {
    for (int pass = 0; pass < 64; ++pass) {
      bool improved = false;
      if (vx_free) {
        for (std::size_t x = 0; x < p.nx; ++x)
          for (std::size_t a = 0; a < p.nv; ++a)
            for (std::size_t b = 0; b < p.nv; ++b) {
              if (a == b || best.vx[x * p.nv + a] <= 0.0) continue;
              std::vector<double> cand = best.vx;
              const double t = std::min(delta, cand[x * p.nv + a]);
              cand[x * p.nv + a] -= t;
              cand[x * p.nv + b] += t;
              VLevel cv;
              cv.build(p.st, cand, p.nv);
              if (!p.feasible(cv)) continue;
              const double val = eval(cv, best.uv);
              if (val > best.value + kRefineGain) {
                best.value = val;
                best.vx = std::move(cand);
                vl = std::move(cv);
                improved = true;
              }
            }
      }
      for (std::size_t v = 0; v < p.nv; ++v)
        for (std::size_t a = 0; a < p.nu; ++a)
          for (std::size_t b = 0; b < p.nu; ++b) {
            if (a == b || best.uv[v * p.nu + a] <= 0.0) continue;
            std::vector<double> cand = best.uv;
            const double t = std::min(delta, cand[v * p.nu + a]);
            cand[v * p.nu + a] -= t;
            cand[v * p.nu + b] += t;
            const double val = eval(vl, cand);
            if (val > best.value + kRefineGain) {
              best.value = val;
              best.uv = std::move(cand);
              improved = true;
            }
          }
      if (!improved) break;
    }
  }
}

std::vector<std::vector<double>> rows_of(const std::vector<double>& flat, std::size_t cols) {
  std::vector<std::vector<double>> r(flat.size() / cols);
  for (std::size_t i = 0; i < r.size(); ++i) r[i].assign(flat.begin() + i * cols, flat.begin() + (i + 1) * cols);
  return r;
}

void check_cap(double v, const char* what) {
  if (std::isnan(v) || v < 0.0) throw ProbError(std::string(what) + " must be non-negative");
}

}  // namespace

EquivocationResult max_equivocation(const JointDist& source, const DistortionMeasure& d,
                                    double rate_cap, double key_rate, double dist_cap,
                                    const SearchConfig& cfg) {
  check_cap(rate_cap, "rate cap");
  check_cap(dist_cap, "distortion cap");
  check_cap(key_rate, "key rate");
  if (!std::isfinite(key_rate)) throw ProbError("key rate must be finite");
  if (cfg.grid < 1) throw ProbError("grid resolution must be >= 1");
  if (cfg.u_card < 1) throw ProbError("|U| must be >= 1");

  const SourceTables st(source, d);
  const std::size_t nx = st.nx;
  const bool pinned = cfg.pinned_vx.has_value();
  if (pinned && cfg.pinned_vx->rows() != nx) throw ProbError("pinned p(v|x) must have |X| rows");
  const std::size_t nv = pinned ? cfg.pinned_vx->cols() : (cfg.v_card ? cfg.v_card : nx);
  const std::size_t nu = cfg.u_card;
  const Problem prob{st, nx, nv, nu, rate_cap, key_rate, dist_cap};

  const SimplexGrid vgrid(nv, cfg.grid);
  const SimplexGrid ugrid(nu, cfg.grid);
  constexpr std::size_t kSat = std::numeric_limits<std::size_t>::max();
  const std::size_t n_vx = pinned ? 1 : detail::grid_product(vgrid.size(), nx);
  const std::size_t n_uv = detail::grid_product(ugrid.size(), nv);
  if (cfg.exhaustive && (n_vx == kSat || n_uv == kSat))
    throw ProbError("exhaustive grid too large to enumerate");
  const bool inner_exhaustive = cfg.exhaustive || n_uv <= cfg.inner_exhaustive_limit;

  std::vector<std::size_t> outer;
  const bool sampled = !cfg.exhaustive && n_vx > cfg.outer_limit;
  if (sampled) {
    if (n_vx == kSat) throw ProbError("p(v|x) grid too large; lower |V| or the grid resolution");
    std::mt19937_64 rng(mix64(cfg.seed));
    outer.push_back(0);
    for (std::size_t i = 0; i < cfg.outer_samples; ++i) outer.push_back(rng() % n_vx);
    std::sort(outer.begin(), outer.end());
    outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
  }
  const std::size_t n_outer = sampled ? outer.size() : n_vx;

  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(n_outer, 64));
  std::vector<Best> shard_best(shards);
  std::vector<std::uint64_t> shard_evals(shards, 0);
  for_each_shard(n_outer, shards, [&](std::size_t s, std::size_t b, std::size_t e) {
    InnerSearch inner(prob, ugrid, cfg);
    VLevel vl;
    std::vector<double> vx(nx * nv);
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t oi = sampled ? outer[i] : i;
      if (pinned) {
        const auto k = cfg.pinned_vx->kernel();
        vx.assign(k.begin(), k.end());
      } else {
        decode_rows(oi, vgrid, nx, vx.data());
      }
      vl.build(st, vx, nv);
      if (!prob.feasible(vl)) continue;
      inner.run(vl, vx, oi, inner_exhaustive, shard_best[s]);
    }
    shard_evals[s] = inner.evaluations;
  });

  EquivocationResult res;
  Best best;
  for (std::size_t s = 0; s < shards; ++s) {
    res.evaluations += shard_evals[s];
    if (shard_best[s].value > best.value) best = std::move(shard_best[s]);
  }

  for (const auto& ws : cfg.warm_starts) {
    if (ws.v_card() != nv || ws.u_card() != nu || ws.vx.rows() != nx) continue;
    Best cand;
    cand.vx.assign(ws.vx.kernel().begin(), ws.vx.kernel().end());
    cand.uv.assign(ws.uv.kernel().begin(), ws.uv.kernel().end());
    if (pinned && cand.vx != std::vector<double>(cfg.pinned_vx->kernel().begin(),
                                                 cfg.pinned_vx->kernel().end()))
      continue;
    VLevel vl;
    vl.build(st, cand.vx, nv);
    if (!prob.feasible(vl)) continue;
    UEvaluator ue;
    ++res.evaluations;
    cand.value = ue.equivocation(st, vl, cand.uv.data(), nu, key_rate);
    if (cand.value > best.value) best = std::move(cand);
  }

  if (best.value == kNegInf) return res;  // infeasible

  SchemeParams grid_scheme = make_scheme(source, d, rows_of(best.vx, nv), rows_of(best.uv, nu));
  BoundEvaluation grid_bounds = evaluate_bounds(source, grid_scheme, d, key_rate);
  res.status = SearchStatus::kOk;
  res.grid_equivocation = grid_bounds.equiv_max;
  res.scheme = std::move(grid_scheme);
  res.bounds = grid_bounds;
  res.equivocation = grid_bounds.equiv_max;

  if (cfg.refine_iters > 0) {
    Best refined = best;
    refine(prob, !pinned, cfg.grid, cfg.refine_iters, refined, res.evaluations);
    if (refined.vx != best.vx || refined.uv != best.uv) {
      SchemeParams rs = make_scheme(source, d, rows_of(refined.vx, nv), rows_of(refined.uv, nu));
      BoundEvaluation rb = evaluate_bounds(source, rs, d, key_rate);
      if (rb.equiv_max > grid_bounds.equiv_max && rb.rate_min <= rate_cap + kAchieveSlack &&
          rb.distortion <= dist_cap + kAchieveSlack) {
        res.scheme = std::move(rs);
        res.bounds = rb;
        res.equivocation = rb.equiv_max;
      }
    }
  }
  return res;
}

}  // namespace equiregion
