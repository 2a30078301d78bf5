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

#include "equiregion/prob.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "equiregion/kernels.hpp"

namespace equiregion {

namespace {

double clamp_info(double v) { return std::fabs(v) < kInfoClamp ? 0.0 : v; }

void check_mass_entries(std::span<const double> m, const char* what) {
  for (double v : m) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ProbError(std::string(what) + ": entries must be finite and non-negative");
  }
}

std::size_t product_size(const std::vector<Alphabet>& vars) {
  std::size_t n = 1;
  for (const auto& a : vars) n *= a.size();
  return n;
}

// Walks every multi-index of `shape` in row-major order, keeping a
// running offset for each of several stride vectors.
template <std::size_t K, class F>
void odometer(const std::vector<std::size_t>& shape,
              const std::array<std::vector<std::size_t>, K>& strides, F&& visit) {
  const std::size_t rank = shape.size();
  std::size_t total = 1;
  for (auto s : shape) total *= s;
  std::vector<std::size_t> idx(rank, 0);
  std::array<std::size_t, K> off{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    visit(flat, off);
    for (std::size_t d = rank; d-- > 0;) {
      ++idx[d];
      for (std::size_t k = 0; k < K; ++k) off[k] += strides[k][d];
      if (idx[d] < shape[d]) break;
      for (std::size_t k = 0; k < K; ++k) off[k] -= strides[k][d] * shape[d];
      idx[d] = 0;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::string name, std::vector<std::string> symbols)
    : name_(std::move(name)), symbols_(std::move(symbols)) {
  if (name_.empty()) throw ProbError("alphabet name must be non-empty");
  if (symbols_.empty()) throw ProbError("alphabet '" + name_ + "' has no symbols");
  std::set<std::string> seen(symbols_.begin(), symbols_.end());
  if (seen.size() != symbols_.size())
    throw ProbError("alphabet '" + name_ + "' has duplicate symbols");
}

Alphabet Alphabet::indexed(std::string name, std::size_t size) {
  std::vector<std::string> s;
  s.reserve(size);
  for (std::size_t i = 0; i < size; ++i) s.push_back(std::to_string(i));
  return Alphabet(std::move(name), std::move(s));
}

std::size_t Alphabet::index_of(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return i;
  throw ProbError("symbol '" + std::string(symbol) + "' not in alphabet '" + name_ + "'");
}

// ---------------------------------------------------------------- JointDist

JointDist::JointDist(std::vector<Alphabet> variables, std::vector<double> mass)
    : vars_(std::move(variables)), mass_(std::move(mass)) {
  std::set<std::string> names;
  for (const auto& a : vars_) {
    if (!names.insert(a.name()).second)
      throw ProbError("duplicate variable name '" + a.name() + "'");
  }
  if (mass_.size() != product_size(vars_))
    throw ProbError("mass tensor size " + std::to_string(mass_.size()) +
                    " does not match alphabet product " + std::to_string(product_size(vars_)));
  check_mass_entries(mass_, "joint mass");
  const double s = kernels::sum(mass_);
  if (std::fabs(s - 1.0) > kNormTolerance)
    throw ProbError("joint mass sums to " + std::to_string(s) + ", expected 1");
}

std::vector<std::size_t> JointDist::shape() const {
  std::vector<std::size_t> s;
  for (const auto& a : vars_) s.push_back(a.size());
  return s;
}

std::size_t JointDist::position(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name() == name) return i;
  throw ProbError("unknown variable '" + std::string(name) + "'");
}

bool JointDist::has(std::string_view name) const {
  return std::any_of(vars_.begin(), vars_.end(), [&](const Alphabet& a) { return a.name() == name; });
}

double JointDist::at(std::span<const std::size_t> index) const {
  if (index.size() != vars_.size()) throw ProbError("index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t d = 0; d < vars_.size(); ++d) {
    if (index[d] >= vars_[d].size()) throw ProbError("index out of range");
    flat = flat * vars_[d].size() + index[d];
  }
  return mass_[flat];
}

// ---------------------------------------------------------------- CondChannel

CondChannel::CondChannel(std::vector<Alphabet> from, std::vector<Alphabet> to,
                         std::vector<double> kernel)
    : from_(std::move(from)), to_(std::move(to)), kernel_(std::move(kernel)) {
  rows_ = product_size(from_);
  cols_ = product_size(to_);
  if (to_.empty()) throw ProbError("channel needs at least one output variable");
  if (kernel_.size() != rows_ * cols_)
    throw ProbError("channel kernel size " + std::to_string(kernel_.size()) + " != " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
  check_mass_entries(kernel_, "channel kernel");
  for (std::size_t r = 0; r < rows_; ++r) {
    const double s = kernels::sum(row(r));
    if (std::fabs(s - 1.0) > kNormTolerance)
      throw ProbError("channel row " + std::to_string(r) + " sums to " + std::to_string(s));
  }
}

CondChannel CondChannel::from_rows(const Alphabet& from, const Alphabet& to,
                                   const std::vector<std::vector<double>>& rows) {
  if (rows.size() != from.size()) throw ProbError("channel needs one row per input symbol");
  std::vector<double> k;
  for (const auto& r : rows) {
    if (r.size() != to.size()) throw ProbError("channel row width != output alphabet size");
    k.insert(k.end(), r.begin(), r.end());
  }
  return CondChannel({from}, {to}, std::move(k));
}

CondChannel CondChannel::identity(const Alphabet& from, const Alphabet& to) {
  if (from.size() != to.size()) throw ProbError("identity channel needs equal alphabet sizes");
  std::vector<double> k(from.size() * to.size(), 0.0);
  for (std::size_t i = 0; i < from.size(); ++i) k[i * to.size() + i] = 1.0;
  return CondChannel({from}, {to}, std::move(k));
}

CondChannel CondChannel::constant(const Alphabet& from, const Alphabet& to, std::size_t symbol) {
  if (symbol >= to.size()) throw ProbError("constant channel symbol out of range");
  std::vector<double> k(from.size() * to.size(), 0.0);
  for (std::size_t i = 0; i < from.size(); ++i) k[i * to.size() + symbol] = 1.0;
  return CondChannel({from}, {to}, std::move(k));
}

// ---------------------------------------------------------------- Distortion

DistortionMeasure::DistortionMeasure(Alphabet source, Alphabet recon, std::vector<double> table)
    : source_(std::move(source)), recon_(std::move(recon)), table_(std::move(table)) {
  if (table_.size() != source_.size() * recon_.size())
    throw ProbError("distortion table must be |X| x |Xhat|");
  check_mass_entries(table_, "distortion table");
}

DistortionMeasure DistortionMeasure::hamming(const Alphabet& source) {
  const std::size_t n = source.size();
  std::vector<double> t(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 0.0;
  return DistortionMeasure(source, source.renamed("Xhat"), std::move(t));
}

// ---------------------------------------------------------------- operations

JointDist attach(const JointDist& base, const CondChannel& ch) {
  const auto& bv = base.variables();
  std::vector<std::size_t> from_pos;
  for (const auto& f : ch.from_vars()) {
    if (!base.has(f.name()))
      throw ProbError("channel input '" + f.name() + "' not present in base distribution");
    const std::size_t p = base.position(f.name());
    if (bv[p].size() != f.size())
      throw ProbError("channel input '" + f.name() + "' has size " + std::to_string(f.size()) +
                      " but base alphabet has size " + std::to_string(bv[p].size()));
    from_pos.push_back(p);
  }
  for (const auto& t : ch.to_vars()) {
    if (base.has(t.name())) throw ProbError("channel output '" + t.name() + "' already in base");
  }

  std::vector<std::size_t> shape = base.shape();
  std::array<std::vector<std::size_t>, 1> row_stride{std::vector<std::size_t>(shape.size(), 0)};
  std::size_t s = 1;
  for (std::size_t k = from_pos.size(); k-- > 0;) {
    row_stride[0][from_pos[k]] = s;
    s *= bv[from_pos[k]].size();
  }

  const std::size_t cols = ch.cols();
  std::vector<double> out(base.size() * cols);
  const auto m = base.mass();
  odometer<1>(shape, row_stride, [&](std::size_t flat, const std::array<std::size_t, 1>& off) {
    const auto r = ch.row(off[0]);
    for (std::size_t c = 0; c < cols; ++c) out[flat * cols + c] = m[flat] * r[c];
  });

  std::vector<Alphabet> vars = bv;
  vars.insert(vars.end(), ch.to_vars().begin(), ch.to_vars().end());
  return JointDist(std::move(vars), std::move(out));
}

JointDist compose(const JointDist& base, const CondChannel& vx, const CondChannel& uv) {
  if (uv.from_vars().size() != vx.to_vars().size())
    throw ProbError("uv channel must condition on the vx output");
  for (std::size_t i = 0; i < uv.from_vars().size(); ++i) {
    if (uv.from_vars()[i].name() != vx.to_vars()[i].name() ||
        uv.from_vars()[i].size() != vx.to_vars()[i].size())
      throw ProbError("uv channel input does not match vx output alphabet");
  }
  return attach(attach(base, vx), uv);
}

namespace {

std::vector<std::size_t> sorted_positions(const JointDist& j, const VarList& names) {
  std::vector<std::size_t> pos;
  for (const auto& n : names) pos.push_back(j.position(n));
  std::sort(pos.begin(), pos.end());
  if (std::adjacent_find(pos.begin(), pos.end()) != pos.end())
    throw ProbError("variable listed twice");
  return pos;
}

// Strides follow the order of `keep`.
std::vector<double> marginal_mass(const JointDist& j, const std::vector<std::size_t>& keep) {
  const auto shape = j.shape();
  std::array<std::vector<std::size_t>, 1> stride{std::vector<std::size_t>(shape.size(), 0)};
  std::size_t s = 1;
  for (std::size_t k = keep.size(); k-- > 0;) {
    stride[0][keep[k]] = s;
    s *= shape[keep[k]];
  }
  std::vector<double> out(s, 0.0);
  const auto m = j.mass();
  odometer<1>(shape, stride,
              [&](std::size_t flat, const std::array<std::size_t, 1>& off) { out[off[0]] += m[flat]; });
  return out;
}

double raw_entropy(const JointDist& j, const VarList& vars) {
  if (vars.empty()) return 0.0;
  const auto mass = marginal_mass(j, sorted_positions(j, vars));
  return kernels::entropy_bits(mass);
}

VarList join(const VarList& a, const VarList& b) {
  VarList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

JointDist marginalize(const JointDist& j, const VarList& keep) {
  std::vector<std::size_t> pos;
  std::set<std::string> seen;
  for (const auto& n : keep) {
    if (!seen.insert(n).second) throw ProbError("variable '" + n + "' listed twice");
    pos.push_back(j.position(n));
  }
  std::vector<double> out = marginal_mass(j, pos);  // caller's order
  std::vector<Alphabet> vars;
  for (auto p : pos) vars.push_back(j.variables()[p]);
  return JointDist(std::move(vars), std::move(out));
}

double entropy(const JointDist& j, const VarList& vars) {
  return std::max(0.0, clamp_info(raw_entropy(j, vars)));
}

double cond_entropy(const JointDist& j, const VarList& a, const VarList& c) {
  return std::max(0.0, clamp_info(raw_entropy(j, join(a, c)) - raw_entropy(j, c)));
}

double mutual_info(const JointDist& j, const VarList& a, const VarList& b) {
  return cond_mutual_info(j, a, b, {});
}

double cond_mutual_info(const JointDist& j, const VarList& a, const VarList& b, const VarList& c) {
  std::set<std::string> seen;
  for (const VarList* g : {&a, &b, &c}) {
    for (const auto& n : *g) {
      if (!seen.insert(n).second)
        throw ProbError("variable groups overlap on '" + n + "'");
    }
  }
  const double v = raw_entropy(j, join(a, c)) + raw_entropy(j, join(b, c)) -
                   raw_entropy(j, join(join(a, b), c)) - raw_entropy(j, c);
  return clamp_info(v);
}

double tv_distance(const JointDist& p, const JointDist& q) {
  if (p.variables() != q.variables())
    throw ProbError("tv_distance needs identical variable lists and alphabets");
  return kernels::l1_distance(p.mass(), q.mass());
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double entropy_of(std::span<const double> mass) { return kernels::entropy_bits(mass); }

}  // namespace equiregion
