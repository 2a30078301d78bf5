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
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace equiregion {

// Thrown for malformed inputs: shape mismatches, unknown names, bad masses.
class ProbError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kInfoClamp = 1e-10;

class Alphabet {
 public:
  Alphabet(std::string name, std::vector<std::string> symbols);

  // Symbols "0", "1", ..., "size-1".
  static Alphabet indexed(std::string name, std::size_t size);

  const std::string& name() const { return name_; }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
  std::size_t index_of(std::string_view symbol) const;

  Alphabet renamed(std::string name) const { return Alphabet(std::move(name), symbols_); }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::string name_;
  std::vector<std::string> symbols_;
};

using VarList = std::vector<std::string>;

// Dense row-major probability tensor; the last variable varies fastest.
class JointDist {
 public:
  JointDist(std::vector<Alphabet> variables, std::vector<double> mass);

  const std::vector<Alphabet>& variables() const { return vars_; }
  std::span<const double> mass() const { return mass_; }
  std::vector<std::size_t> shape() const;
  std::size_t rank() const { return vars_.size(); }
  std::size_t size() const { return mass_.size(); }

  std::size_t position(std::string_view name) const;
  bool has(std::string_view name) const;
  const Alphabet& variable(std::string_view name) const { return vars_[position(name)]; }

  double at(std::span<const std::size_t> index) const;
  double at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

 private:
  std::vector<Alphabet> vars_;
  std::vector<double> mass_;
};

// Conditional PMF. Row index enumerates the from-tuple (row-major), column
// index the to-tuple.
class CondChannel {
 public:
  CondChannel(std::vector<Alphabet> from, std::vector<Alphabet> to, std::vector<double> kernel);

  static CondChannel from_rows(const Alphabet& from, const Alphabet& to,
                               const std::vector<std::vector<double>>& rows);
  static CondChannel identity(const Alphabet& from, const Alphabet& to);
  static CondChannel constant(const Alphabet& from, const Alphabet& to, std::size_t symbol = 0);

  const std::vector<Alphabet>& from_vars() const { return from_; }
  const std::vector<Alphabet>& to_vars() const { return to_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return kernel_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {kernel_.data() + r * cols_, cols_}; }
  std::span<const double> kernel() const { return kernel_; }

 private:
  std::vector<Alphabet> from_;
  std::vector<Alphabet> to_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> kernel_;
};

class DistortionMeasure {
 public:
  DistortionMeasure(Alphabet source, Alphabet recon, std::vector<double> table);
  static DistortionMeasure hamming(const Alphabet& source);

  const Alphabet& source_alphabet() const { return source_; }
  const Alphabet& recon_alphabet() const { return recon_; }
  double operator()(std::size_t x, std::size_t xhat) const { return table_[x * recon_.size() + xhat]; }
  std::span<const double> table() const { return table_; }

 private:
  Alphabet source_;
  Alphabet recon_;
  std::vector<double> table_;
};

// p(x,y,z) p(v|x) p(u|v). The vx channel conditions on the base variable
// carrying its from-alphabet name; uv conditions on vx's output.
JointDist compose(const JointDist& base, const CondChannel& vx, const CondChannel& uv);

// p(base) p(out | cond) for a channel whose from-variables all live in base.
JointDist attach(const JointDist& base, const CondChannel& channel);

JointDist marginalize(const JointDist& j, const VarList& keep);

double entropy(const JointDist& j, const VarList& vars);
double cond_entropy(const JointDist& j, const VarList& a, const VarList& c);
double mutual_info(const JointDist& j, const VarList& a, const VarList& b);
double cond_mutual_info(const JointDist& j, const VarList& a, const VarList& b, const VarList& c);

double tv_distance(const JointDist& p, const JointDist& q);

// Binary entropy in bits.
double binary_entropy(double p);

// Entropy of a raw mass vector, no normalization check.
double entropy_of(std::span<const double> mass);

}  // namespace equiregion
