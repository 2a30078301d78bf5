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

// The corollary searches deliberately avoid the region engine: each one
// evaluates its own closed form on its own auxiliaries. Only the simplex
// grid enumeration is shared.

#include "equiregion/special_cases.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "equiregion/parallel.hpp"
#include "region/engine.hpp"

namespace equiregion {

namespace {

using detail::SimplexGrid;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRefineGain = 1e-9;

double h(const std::vector<double>& m) { return entropy_of(m); }

struct Eval {
  bool feasible = false;
  double value = kNegInf;
};

struct Block {
  std::size_t rows, cols;
};

struct Winner {
  double value = kNegInf;
  std::vector<double> params;
};

std::size_t param_count(const std::vector<Block>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.rows * b.cols;
  return n;
}

// Exhaustive grid over every row of every block (first row most significant),
// then halving-step refinement. MakeEval builds one evaluator per shard.
template <class MakeEval>
Winner corollary_search(const std::vector<Block>& blocks, const CorollarySearch& cs, MakeEval make_eval,
                        std::uint64_t& evaluations) {
  if (cs.grid < 1) throw ProbError("grid resolution must be >= 1");
  std::vector<SimplexGrid> grids;
  std::vector<const SimplexGrid*> row_grid;
  std::vector<std::size_t> row_offset, row_cols;
  std::size_t offset = 0;
  grids.reserve(blocks.size());
  for (const auto& b : blocks) grids.emplace_back(b.cols, cs.grid);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t r = 0; r < blocks[i].rows; ++r) {
      row_grid.push_back(&grids[i]);
      row_offset.push_back(offset);
      row_cols.push_back(blocks[i].cols);
      offset += blocks[i].cols;
      const std::uint64_t m = grids[i].size();
      if (total > cs.budget / m) throw BudgetError("corollary grid exceeds the evaluation budget");
      total *= m;
    }
  const std::size_t nrows = row_grid.size();
  const std::size_t np = param_count(blocks);

  const std::size_t shards = static_cast<std::size_t>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(total, 64)));
  std::vector<Winner> shard_best(shards);
  std::vector<std::uint64_t> shard_evals(shards, 0);
  for_each_shard(static_cast<std::size_t>(total), shards, [&](std::size_t s, std::size_t b, std::size_t e) {
    if (b == e) return;
    auto ev = make_eval();
    std::vector<std::size_t> digit(nrows);
    std::vector<double> params(np);
    std::size_t idx = b;
    for (std::size_t r = nrows; r-- > 0;) {
      digit[r] = idx % row_grid[r]->size();
      idx /= row_grid[r]->size();
      std::copy_n(row_grid[r]->point(digit[r]), row_cols[r], params.data() + row_offset[r]);
    }
    Winner& best = shard_best[s];
    for (std::size_t i = b; i < e; ++i) {
      const Eval v = ev(params.data());
      ++shard_evals[s];
      if (v.feasible && v.value > best.value) {
        best.value = v.value;
        best.params = params;
      }
      for (std::size_t r = nrows; r-- > 0;) {
        if (++digit[r] < row_grid[r]->size()) {
          std::copy_n(row_grid[r]->point(digit[r]), row_cols[r], params.data() + row_offset[r]);
          break;
        }
        digit[r] = 0;
        std::copy_n(row_grid[r]->point(0), row_cols[r], params.data() + row_offset[r]);
      }
    }
  });

  Winner best;
  for (std::size_t s = 0; s < shards; ++s) {
    evaluations += shard_evals[s];
    if (shard_best[s].value > best.value) best = std::move(shard_best[s]);
  }
  if (best.value == kNegInf || cs.refine_iters <= 0) return best;

  auto ev = make_eval();
  double delta = 1.0 / (2.0 * cs.grid);
  for (int it = 0; it < cs.refine_iters; ++it, delta /= 2.0) {
    for (int pass = 0; pass < 64; ++pass) {
      bool improved = false;
      for (std::size_t r = 0; r < nrows; ++r) {
        const std::size_t o = row_offset[r], k = row_cols[r];
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t c = 0; c < k; ++c) {
            if (a == c || best.params[o + a] <= 0.0) continue;
            std::vector<double> cand = best.params;
            const double t = std::min(delta, cand[o + a]);
            cand[o + a] -= t;
            cand[o + c] += t;
            const Eval v = ev(cand.data());
            ++evaluations;
            if (v.feasible && v.value > best.value + kRefineGain) {
              best.value = v.value;
              best.params = std::move(cand);
              improved = true;
            }
          }
      }
      if (!improved) break;
    }
  }
  return best;
}

std::vector<std::vector<double>> rows_of(const double* p, std::size_t rows, std::size_t cols) {
  std::vector<std::vector<double>> r(rows);
  for (std::size_t i = 0; i < rows; ++i) r[i].assign(p + i * cols, p + (i + 1) * cols);
  return r;
}

struct Marginals {
  std::vector<double> pxy, pxz;  // [x][y], [x][z]
  std::size_t nx, ny, nz;
};

Marginals marginals(const JointDist& source) {
  if (source.rank() != 3) throw ProbError("source must be a joint over (X, Y, Z)");
  Marginals m;
  const auto& v = source.variables();
  m.nx = v[0].size();
  m.ny = v[1].size();
  m.nz = v[2].size();
  m.pxy.assign(m.nx * m.ny, 0.0);
  m.pxz.assign(m.nx * m.nz, 0.0);
  const auto mass = source.mass();
  for (std::size_t x = 0; x < m.nx; ++x)
    for (std::size_t y = 0; y < m.ny; ++y)
      for (std::size_t z = 0; z < m.nz; ++z) {
        const double p = mass[(x * m.ny + y) * m.nz + z];
        m.pxy[x * m.ny + y] += p;
        m.pxz[x * m.nz + z] += p;
      }
  return m;
}

// I(A;B|C) from the joint p(a,b,c) stored [a][b][c].
double cmi_abc(const std::vector<double>& pabc, std::size_t na, std::size_t nb, std::size_t nc) {
  std::vector<double> pac(na * nc, 0.0), pbc(nb * nc, 0.0), pc(nc, 0.0);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t c = 0; c < nc; ++c) {
        const double p = pabc[(a * nb + b) * nc + c];
        pac[a * nc + c] += p;
        pbc[b * nc + c] += p;
        pc[c] += p;
      }
  return h(pac) + h(pbc) - h(pabc) - h(pc);
}

// H(A|B) from p(a,b) stored [a][b].
double cond_h_ab(const std::vector<double>& pab, std::size_t na, std::size_t nb) {
  std::vector<double> pb(nb, 0.0);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) pb[b] += pab[a * nb + b];
  return h(pab) - h(pb);
}

// ---- lossless: params p(u|x) ----
class LosslessEval {
 public:
  LosslessEval(const Marginals& m, std::size_t nu, double key) : m_(m), nu_(nu), key_(key) {}

  Eval operator()(const double* w) {
    const std::size_t nx = m_.nx, ny = m_.ny, nz = m_.nz, nu = nu_;
    // Stored [x][y][u] and [x][z][u]; the X-marginal terms cancel in the difference.
    xyu_.assign(nx * ny * nu, 0.0);
    xzu_.assign(nx * nz * nu, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t u = 0; u < nu; ++u) xyu_[(x * ny + y) * nu + u] = m_.pxy[x * ny + y] * w[x * nu + u];
      for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t u = 0; u < nu; ++u) xzu_[(x * nz + z) * nu + u] = m_.pxz[x * nz + z] * w[x * nu + u];
    }
    const double ixy_u = cmi_abc(xyu_, nx, ny, nu);
    const double ixz_u = cmi_abc(xzu_, nx, nz, nu);
    // H(X|Z,U) with (Z,U) flattened as the conditioning index.
    const double hx_zu = cond_h_ab(xzu_, nx, nz * nu);
    return {true, std::min(ixy_u - ixz_u + key_, hx_zu)};
  }

 private:
  const Marginals& m_;
  std::size_t nu_;
  double key_;
  std::vector<double> xyu_, xzu_;
};

// ---- no key: params p(v|x) then p(u|v) ----
class NoKeyEval {
 public:
  NoKeyEval(const Marginals& m, const DistortionMeasure& d, std::size_t nv, std::size_t nu, double rcap,
            double dcap)
      : m_(m), d_(d), nv_(nv), nu_(nu), rcap_(rcap), dcap_(dcap) {}

  Eval operator()(const double* p) {
    const std::size_t nx = m_.nx, ny = m_.ny, nz = m_.nz, nv = nv_, nu = nu_;
    if (last_vx_.empty() || std::memcmp(last_vx_.data(), p, nx * nv * sizeof(double)) != 0) {
      last_vx_.assign(p, p + nx * nv);
      build_v(p);
    }
    if (!v_ok_) return {};
    const double* uv = p + nx * nv;
    // p(y,v,u) and p(z,v,u), stored [y][v][u].
    yvu_.assign(ny * nv * nu, 0.0);
    zvu_.assign(nz * nv * nu, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t u = 0; u < nu; ++u) yvu_[(y * nv + v) * nu + u] = yv_[y * nv + v] * uv[v * nu + u];
    for (std::size_t z = 0; z < nz; ++z)
      for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t u = 0; u < nu; ++u) zvu_[(z * nv + v) * nu + u] = zv_[z * nv + v] * uv[v * nu + u];
    const double iyv_u = cmi_abc(yvu_, ny, nv, nu);
    const double izv_u = cmi_abc(zvu_, nz, nv, nu);
    return {true, iyv_u - izv_u + hx_zv_};
  }

 private:
  void build_v(const double* vx) {
    const std::size_t nx = m_.nx, ny = m_.ny, nz = m_.nz, nv = nv_;
    std::vector<double> xyv(nx * ny * nv), xzv(nx * nz * nv);
    yv_.assign(ny * nv, 0.0);
    zv_.assign(nz * nv, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t v = 0; v < nv; ++v) {
        for (std::size_t y = 0; y < ny; ++y) {
          const double q = m_.pxy[x * ny + y] * vx[x * nv + v];
          xyv[(x * ny + y) * nv + v] = q;
          yv_[y * nv + v] += q;
        }
        for (std::size_t z = 0; z < nz; ++z) {
          const double q = m_.pxz[x * nz + z] * vx[x * nv + v];
          xzv[(x * nz + z) * nv + v] = q;
          zv_[z * nv + v] += q;
        }
      }
    // I(X;V|Y) with the roles arranged as [x][v][y].
    std::vector<double> xvy(nx * nv * ny);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t v = 0; v < nv; ++v) xvy[(x * nv + v) * ny + y] = xyv[(x * ny + y) * nv + v];
    const double rate = cmi_abc(xvy, nx, nv, ny);
    double dist = 0.0;
    const std::size_t nxh = d_.recon_alphabet().size();
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t v = 0; v < nv; ++v) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t xh = 0; xh < nxh; ++xh) {
          double c = 0.0;
          for (std::size_t x = 0; x < nx; ++x) c += xyv[(x * ny + y) * nv + v] * d_(x, xh);
          best = std::min(best, c);
        }
        dist += best;
      }
    v_ok_ = rate <= rcap_ + kAchieveSlack && dist <= dcap_ + kAchieveSlack;
    hx_zv_ = cond_h_ab(xzv, nx, nz * nv);
  }

  const Marginals& m_;
  const DistortionMeasure& d_;
  std::size_t nv_, nu_;
  double rcap_, dcap_;
  std::vector<double> last_vx_, yv_, zv_, yvu_, zvu_;
  bool v_ok_ = false;
  double hx_zv_ = 0.0;
};

// ---- no side information: params p(xhat,u|x), column index xhat * |U| + u ----
class NoSiEval {
 public:
  NoSiEval(const Marginals& m, const DistortionMeasure& d, std::size_t nu, double key, double rcap, double dcap)
      : m_(m), d_(d), nxh_(d.recon_alphabet().size()), nu_(nu), key_(key), rcap_(rcap), dcap_(dcap) {}

  Eval operator()(const double* w) {
    const std::size_t nx = m_.nx, nz = m_.nz, nxh = nxh_, nu = nu_, nw = nxh * nu;
    std::vector<double> px(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t z = 0; z < nz; ++z) px[x] += m_.pxz[x * nz + z];
    double dist = 0.0;
    xw_.assign(nx * nw, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t k = 0; k < nw; ++k) {
        xw_[x * nw + k] = px[x] * w[x * nw + k];
        dist += xw_[x * nw + k] * d_(x, k / nu);
      }
    // I(X; Xhat,U) = H(X) - H(X | Xhat,U), as [x][w] with an empty third axis.
    const double rate = cmi_abc(xw_, nx, nw, 1);
    if (rate > rcap_ + kAchieveSlack || dist > dcap_ + kAchieveSlack) return {};
    // p(x, z, xhat, u) stored [x][z][xhat][u].
    xzw_.assign(nx * nz * nw, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t k = 0; k < nw; ++k) xzw_[(x * nz + z) * nw + k] = m_.pxz[x * nz + z] * w[x * nw + k];
    // I(Z; Xhat | U) from [z][xhat][u].
    std::vector<double> zxu(nz * nw, 0.0);
    std::vector<double> xzu(nx * nz * nu, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t xh = 0; xh < nxh; ++xh)
          for (std::size_t u = 0; u < nu; ++u) {
            const double q = xzw_[(x * nz + z) * nw + xh * nu + u];
            zxu[(z * nxh + xh) * nu + u] += q;
            xzu[(x * nz + z) * nu + u] += q;
          }
    const double iz_xh_u = cmi_abc(zxu, nz, nxh, nu);
    const double hx_zxu = cond_h_ab(xzw_, nx, nz * nw);
    const double hx_zu = cond_h_ab(xzu, nx, nz * nu);
    return {true, std::min(key_ - iz_xh_u + hx_zxu, hx_zu)};
  }

 private:
  const Marginals& m_;
  const DistortionMeasure& d_;
  std::size_t nxh_, nu_;
  double key_, rcap_, dcap_;
  std::vector<double> xw_, xzw_;
};

void check_nonneg(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ProbError(std::string(what) + " must be finite and non-negative");
}

double diff_of(const CorollaryResult& c, const EquivocationResult& g) {
  if (c.status != g.status) return std::numeric_limits<double>::infinity();
  if (c.status == SearchStatus::kInfeasible) return 0.0;
  return std::fabs(c.equivocation - g.equivocation);
}

}  // namespace

double LemmaTriple::spread() const {
  return std::max({form_a, form_b, form_c}) - std::min({form_a, form_b, form_c});
}

double LemmaTriple::spread_all() const {
  return std::max({form_a, form_b, form_c, form_d}) - std::min({form_a, form_b, form_c, form_d});
}

LemmaTriple lemma1_identities(const JointDist& j) {
  for (const char* n : {"U", "V", "X", "Y", "Z"})
    if (!j.has(n)) throw ProbError(std::string("joint lacks variable ") + n);
  if (j.rank() != 5) throw ProbError("joint must carry exactly U, V, X, Y, Z");
  LemmaTriple t;
  t.form_a = cond_mutual_info(j, {"Y"}, {"V"}, {"U"}) - cond_mutual_info(j, {"Z"}, {"V"}, {"U"}) +
             cond_entropy(j, {"X"}, {"Z", "V"});
  t.form_b = cond_entropy(j, {"X"}, {"Z", "U"}) - cond_mutual_info(j, {"X"}, {"V"}, {"Y", "U"});
  t.form_c = cond_entropy(j, {"X"}, {"Z"}) - cond_mutual_info(j, {"X"}, {"V"}, {"Y"}) +
             mutual_info(j, {"Z"}, {"U"}) - mutual_info(j, {"Y"}, {"U"});
  t.form_d = cond_entropy(j, {"X"}, {"Y", "V"}) + cond_mutual_info(j, {"X"}, {"Y"}, {"U"}) -
             cond_mutual_info(j, {"X"}, {"Z"}, {"U"});
  return t;
}

namespace {

// Flat Dirichlet(1) draw; the bit trick keeps it identical across standard libraries.
std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& v : w) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    v = -std::log(u);
    s += v;
  }
  for (auto& v : w) v /= s;
  return w;
}

std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::vector<std::vector<double>> m(r);
  for (auto& row : m) row = random_simplex(rng, c);
  return m;
}

}  // namespace

IdentitySuiteReport identity_suite(std::size_t trials, std::uint64_t seed, bool break_markov) {
  if (trials < 1) throw ProbError("identity suite needs at least one trial");
  std::mt19937_64 rng(seed);
  auto card = [&rng] { return std::size_t{2} + rng() % 3; };
  IdentitySuiteReport rep;
  rep.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t nx = card(), ny = card(), nz = card(), nv = card(), nu = card();
    const Alphabet X = Alphabet::indexed("X", nx), Y = Alphabet::indexed("Y", ny), Z = Alphabet::indexed("Z", nz),
                   V = Alphabet::indexed("V", nv), U = Alphabet::indexed("U", nu);
    JointDist j = break_markov
                      ? JointDist({U, V, X, Y, Z}, random_simplex(rng, nu * nv * nx * ny * nz))
                      : compose(JointDist({X, Y, Z}, random_simplex(rng, nx * ny * nz)),
                                CondChannel::from_rows(X, V, random_rows(rng, nx, nv)),
                                CondChannel::from_rows(V, U, random_rows(rng, nv, nu)));
    const double s = lemma1_identities(j).spread();
    if (s > rep.worst_spread || t == 0) {
      rep.worst_spread = s;
      rep.worst_trial = t;
    }
  }
  return rep;
}

CorollaryResult lossless_region(const JointDist& source, double key_rate, const CorollarySearch& cs) {
  check_nonneg(key_rate, "key rate");
  if (cs.u_card < 1) throw ProbError("|U| must be >= 1");
  const Marginals m = marginals(source);
  const auto& vars = source.variables();
  CorollaryResult r;
  r.rate_min = cond_entropy(source, {vars[0].name()}, {vars[1].name()});
  const std::size_t nu = cs.u_card;
  const Winner w = corollary_search({{m.nx, nu}}, cs, [&] { return LosslessEval(m, nu, key_rate); },
                                    r.evaluations);
  // Generic re-evaluation of the winner.
  const Alphabet U = Alphabet::indexed("U", nu);
  const auto rows = rows_of(w.params.data(), m.nx, nu);
  const JointDist j = attach(source, CondChannel::from_rows(vars[0], U, rows));
  const std::string X = vars[0].name(), Y = vars[1].name(), Z = vars[2].name();
  r.equivocation = std::min(cond_mutual_info(j, {X}, {Y}, {"U"}) - cond_mutual_info(j, {X}, {Z}, {"U"}) + key_rate,
                            cond_entropy(j, {X}, {Z, "U"}));
  r.status = SearchStatus::kOk;
  r.channels = {rows};
  return r;
}

CorollaryResult no_key_region(const JointDist& source, const DistortionMeasure& d, double rate_cap,
                              double dist_cap, const CorollarySearch& cs) {
  check_nonneg(rate_cap, "rate cap");
  check_nonneg(dist_cap, "distortion cap");
  if (cs.u_card < 1) throw ProbError("|U| must be >= 1");
  const Marginals m = marginals(source);
  if (d.source_alphabet().size() != m.nx) throw ProbError("distortion source alphabet != |X|");
  const std::size_t nv = cs.v_card ? cs.v_card : m.nx, nu = cs.u_card;
  CorollaryResult r;
  const Winner w = corollary_search({{m.nx, nv}, {nv, nu}}, cs,
                                    [&] { return NoKeyEval(m, d, nv, nu, rate_cap, dist_cap); }, r.evaluations);
  if (w.value == kNegInf) return r;
  const auto vx = rows_of(w.params.data(), m.nx, nv);
  const auto uv = rows_of(w.params.data() + m.nx * nv, nv, nu);
  const SchemeParams s = make_scheme(source, d, vx, uv);
  const JointDist j = compose(source, s.vx, s.uv);
  const auto& vars = source.variables();
  const std::string X = vars[0].name(), Y = vars[1].name(), Z = vars[2].name();
  r.equivocation = cond_mutual_info(j, {Y}, {"V"}, {"U"}) - cond_mutual_info(j, {Z}, {"V"}, {"U"}) +
                   cond_entropy(j, {X}, {Z, "V"});
  const BoundEvaluation b = evaluate_bounds(source, s, d, 0.0);
  r.rate_min = b.rate_min;
  r.distortion = b.distortion;
  r.status = SearchStatus::kOk;
  r.channels = {vx, uv};
  return r;
}

CorollaryResult no_si_region(const JointDist& source, const DistortionMeasure& d, double key_rate,
                             double rate_cap, double dist_cap, const CorollarySearch& cs) {
  check_nonneg(key_rate, "key rate");
  check_nonneg(rate_cap, "rate cap");
  check_nonneg(dist_cap, "distortion cap");
  if (cs.u_card < 1) throw ProbError("|U| must be >= 1");
  const Marginals m = marginals(source);
  if (m.ny != 1) throw ProbError("no-side-information case needs a singleton Y alphabet");
  if (d.source_alphabet().size() != m.nx) throw ProbError("distortion source alphabet != |X|");
  const std::size_t nxh = d.recon_alphabet().size(), nu = cs.u_card, nw = nxh * nu;
  CorollaryResult r;
  const Winner w = corollary_search({{m.nx, nw}}, cs,
                                    [&] { return NoSiEval(m, d, nu, key_rate, rate_cap, dist_cap); },
                                    r.evaluations);
  if (w.value == kNegInf) return r;

  // Generic re-evaluation on the explicit five-variable joint (X, Y, Z, Xhat, U).
  const auto& vars = source.variables();
  const Alphabet Xh = d.recon_alphabet().renamed("Xhat"), U = Alphabet::indexed("U", nu);
  std::vector<double> mass(m.nx * m.nz * nw);
  const auto src = source.mass();
  double dist = 0.0;
  for (std::size_t x = 0; x < m.nx; ++x)
    for (std::size_t z = 0; z < m.nz; ++z)
      for (std::size_t k = 0; k < nw; ++k) {
        const double q = src[x * m.nz + z] * w.params[x * nw + k];
        mass[(x * m.nz + z) * nw + k] = q;
        dist += q * d(x, k / nu);
      }
  const JointDist j({vars[0], vars[1], vars[2], Xh, U}, mass);
  const std::string X = vars[0].name(), Z = vars[2].name();
  r.rate_min = mutual_info(j, {X}, {"Xhat", "U"});
  r.distortion = dist;
  r.equivocation = std::min(key_rate - cond_mutual_info(j, {Z}, {"Xhat"}, {"U"}) + cond_entropy(j, {X}, {Z, "Xhat", "U"}),
                            cond_entropy(j, {X}, {Z, "U"}));
  r.status = SearchStatus::kOk;
  r.channels = {rows_of(w.params.data(), m.nx, nw)};
  return r;
}

CrossCheck cross_check_lossless(const JointDist& source, double key_rate, const CorollarySearch& cs,
                                SearchConfig general) {
  CrossCheck c;
  c.corollary = lossless_region(source, key_rate, cs);
  const Alphabet& X = source.variables()[0];
  general.pinned_vx = CondChannel::identity(X, Alphabet::indexed("V", X.size()));
  general.u_card = cs.u_card;
  c.general = max_equivocation(source, DistortionMeasure::hamming(X), c.corollary.rate_min, key_rate, 0.0, general);
  c.abs_diff = diff_of(c.corollary, c.general);
  return c;
}

CrossCheck cross_check_no_key(const JointDist& source, const DistortionMeasure& d, double rate_cap,
                              double dist_cap, const CorollarySearch& cs, SearchConfig general) {
  CrossCheck c;
  c.corollary = no_key_region(source, d, rate_cap, dist_cap, cs);
  general.u_card = cs.u_card;
  general.v_card = cs.v_card;
  c.general = max_equivocation(source, d, rate_cap, 0.0, dist_cap, general);
  c.abs_diff = diff_of(c.corollary, c.general);
  return c;
}

CrossCheck cross_check_no_si(const JointDist& source, const DistortionMeasure& d, double key_rate,
                             double rate_cap, double dist_cap, const CorollarySearch& cs,
                             SearchConfig general) {
  CrossCheck c;
  c.corollary = no_si_region(source, d, key_rate, rate_cap, dist_cap, cs);
  general.u_card = cs.u_card;
  general.v_card = d.recon_alphabet().size() * cs.u_card;
  c.general = max_equivocation(source, d, rate_cap, key_rate, dist_cap, general);
  c.abs_diff = diff_of(c.corollary, c.general);
  return c;
}

}  // namespace equiregion
