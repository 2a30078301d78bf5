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

#include "equiregion/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace equiregion {

namespace {

using nlohmann::json;

constexpr double kPmfTolerance = 1e-9;

[[noreturn]] void fail(std::string_view origin, const std::string& what) {
  throw IoError(std::string(origin) + ": " + what);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(origin, "malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                     e.what());
  }
}

double number_at(const json& v, std::string_view origin, const std::string& field) {
  if (!v.is_number()) fail(origin, "field '" + field + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(origin, "field '" + field + "' must be finite");
  return d;
}

std::vector<std::string> symbols_at(const json& alphabets, const char* key, std::string_view origin,
                                    bool required) {
  if (!alphabets.contains(key) || alphabets[key].is_null()) {
    if (required) fail(origin, std::string("field 'alphabets.") + key + "' is required");
    return {};
  }
  const json& a = alphabets[key];
  if (!a.is_array()) fail(origin, std::string("field 'alphabets.") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_string())
      fail(origin, std::string("field 'alphabets.") + key + "[" + std::to_string(i) + "]' must be a string");
    out.push_back(a[i].get<std::string>());
  }
  return out;
}

Alphabet make_alphabet(const char* name, std::vector<std::string> symbols, std::string_view origin) {
  try {
    return Alphabet(name, std::move(symbols));
  } catch (const ProbError& e) {
    fail(origin, std::string("field 'alphabets.") + name + "': " + e.what());
  }
}

std::vector<std::vector<double>> matrix_at(const json& doc, const char* key, std::size_t rows,
                                           std::string_view origin) {
  if (!doc.contains(key)) fail(origin, std::string("field '") + key + "' is required");
  const json& m = doc[key];
  if (!m.is_array() || m.size() != rows)
    fail(origin, std::string("field '") + key + "' must be an array of " + std::to_string(rows) + " rows");
  std::vector<std::vector<double>> out(rows);
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string where = std::string(key) + "[" + std::to_string(r) + "]";
    if (!m[r].is_array() || m[r].empty()) fail(origin, "field '" + where + "' must be a non-empty array");
    if (r == 0) cols = m[r].size();
    if (m[r].size() != cols) fail(origin, "field '" + where + "' has " + std::to_string(m[r].size()) +
                                              " entries, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) out[r].push_back(number_at(m[r][c], origin, where));
  }
  return out;
}

std::string format_with(double v, int precision) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw IoError(std::string(what) + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  while (true) {
    const std::size_t e = s.find(sep, b);
    out.push_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) break;
    b = e + 1;
  }
  return out;
}

std::vector<double> numbers(std::string_view s, std::string_view what) {
  std::vector<double> out;
  for (auto t : split(s, ' '))
    if (!t.empty()) out.push_back(parse_double(t, what));
  return out;
}

}  // namespace

SourceSpec parse_source_spec(std::string_view text, std::string_view origin) {
  const json doc = parse_json(text, origin);
  if (!doc.is_object()) fail(origin, "top level must be an object");
  if (!doc.contains("alphabets") || !doc["alphabets"].is_object())
    fail(origin, "field 'alphabets' must be an object");
  const json& al = doc["alphabets"];

  auto xs = symbols_at(al, "X", origin, true);
  auto ys = symbols_at(al, "Y", origin, false);
  auto zs = symbols_at(al, "Z", origin, false);
  auto xh = symbols_at(al, "Xhat", origin, false);
  if (xs.empty()) fail(origin, "field 'alphabets.X' must be non-empty");
  if (ys.empty()) ys = {"-"};
  if (zs.empty()) zs = {"-"};
  const bool default_recon = xh.empty();
  if (default_recon) xh = xs;

  const Alphabet X = make_alphabet("X", xs, origin), Y = make_alphabet("Y", ys, origin),
                 Z = make_alphabet("Z", zs, origin), XH = make_alphabet("Xhat", xh, origin);

  if (!doc.contains("pmf") || !doc["pmf"].is_array()) fail(origin, "field 'pmf' must be an array of numbers");
  const json& pj = doc["pmf"];
  const std::size_t want = X.size() * Y.size() * Z.size();
  if (pj.size() != want)
    fail(origin, "field 'pmf' has " + std::to_string(pj.size()) + " entries, expected |X||Y||Z| = " +
                     std::to_string(want));
  std::vector<double> pmf(want);
  double total = 0.0;
  for (std::size_t i = 0; i < want; ++i) {
    pmf[i] = number_at(pj[i], origin, "pmf[" + std::to_string(i) + "]");
    if (pmf[i] < 0.0) fail(origin, "field 'pmf[" + std::to_string(i) + "]' is negative");
    total += pmf[i];
  }
  if (std::fabs(total - 1.0) > kPmfTolerance)
    fail(origin, "field 'pmf' sums to " + format_with(total, 12) + ", expected 1 within 1e-9");
  for (auto& p : pmf) p /= total;

  std::vector<double> table;
  if (doc.contains("distortion") && !doc["distortion"].is_null()) {
    for (const auto& row : matrix_at(doc, "distortion", X.size(), origin)) {
      if (row.size() != XH.size())
        fail(origin, "field 'distortion' must have |Xhat| = " + std::to_string(XH.size()) + " columns");
      for (double v : row) {
        if (v < 0.0) fail(origin, "field 'distortion' has a negative entry");
        table.push_back(v);
      }
    }
  } else {
    if (!default_recon && xh != xs)
      fail(origin, "field 'distortion' is required when 'alphabets.Xhat' differs from 'alphabets.X'");
    for (std::size_t x = 0; x < X.size(); ++x)
      for (std::size_t h = 0; h < XH.size(); ++h) table.push_back(x == h ? 0.0 : 1.0);
  }
  try {
    return SourceSpec{JointDist({X, Y, Z}, std::move(pmf)), DistortionMeasure(X, XH, std::move(table))};
  } catch (const ProbError& e) {
    fail(origin, e.what());
  }
}

SourceSpec load_source_spec(const std::string& path) { return parse_source_spec(read_file(path), path); }

SchemeParams parse_scheme(std::string_view text, const SourceSpec& spec, std::string_view origin) {
  const json doc = parse_json(text, origin);
  if (!doc.is_object()) fail(origin, "top level must be an object");
  const auto vx = matrix_at(doc, "vx", spec.source.variables()[0].size(), origin);
  const auto uv = matrix_at(doc, "uv", vx.front().size(), origin);
  try {
    return make_scheme(spec.source, spec.distortion, vx, uv);
  } catch (const ProbError& e) {
    fail(origin, e.what());
  }
}

SchemeParams load_scheme(const std::string& path, const SourceSpec& spec) {
  return parse_scheme(read_file(path), spec, path);
}

std::string encode_scheme(const SchemeParams& s) {
  std::string out = "V" + std::to_string(s.v_card()) + "U" + std::to_string(s.u_card()) + ";vx:";
  auto join = [&out](auto&& values, auto&& fmt) {
    bool first = true;
    for (const auto& v : values) {
      if (!first) out += ' ';
      first = false;
      out += fmt(v);
    }
  };
  auto f17 = [](double v) { return format_with(v, 17); };
  join(s.vx.kernel(), f17);
  out += ";uv:";
  join(s.uv.kernel(), f17);
  out += ";xh:";
  join(s.recon.table, [](std::size_t v) { return std::to_string(v); });
  return out;
}

SchemeParams decode_scheme(std::string_view digest, const SourceSpec& spec) {
  const std::string what = "scheme digest";
  const auto parts = split(digest, ';');
  if (parts.size() != 4 || parts[0].empty() || parts[0][0] != 'V' || parts[1].substr(0, 3) != "vx:" ||
      parts[2].substr(0, 3) != "uv:" || parts[3].substr(0, 3) != "xh:")
    throw IoError(what + ": unrecognised layout");
  const std::size_t upos = parts[0].find('U');
  if (upos == std::string_view::npos) throw IoError(what + ": missing U cardinality");
  const auto nv = static_cast<std::size_t>(parse_double(parts[0].substr(1, upos - 1), what));
  const auto nu = static_cast<std::size_t>(parse_double(parts[0].substr(upos + 1), what));
  const std::size_t nx = spec.source.variables()[0].size(), ny = spec.source.variables()[1].size();
  const auto vx = numbers(parts[1].substr(3), what), uv = numbers(parts[2].substr(3), what),
             xh = numbers(parts[3].substr(3), what);
  if (nv == 0 || nu == 0 || vx.size() != nx * nv || uv.size() != nv * nu || xh.size() != ny * nv)
    throw IoError(what + ": sizes do not match the source");
  auto rows = [](const std::vector<double>& flat, std::size_t r, std::size_t c) {
    std::vector<std::vector<double>> m(r);
    for (std::size_t i = 0; i < r; ++i) m[i].assign(flat.begin() + i * c, flat.begin() + (i + 1) * c);
    return m;
  };
  try {
    const Alphabet V = Alphabet::indexed("V", nv), U = Alphabet::indexed("U", nu);
    SchemeParams s{CondChannel::from_rows(spec.source.variables()[0], V, rows(vx, nx, nv)),
                   CondChannel::from_rows(V, U, rows(uv, nv, nu)), ReconMap{ny, nv, {}}};
    for (double h : xh) {
      if (h < 0 || h >= double(spec.distortion.recon_alphabet().size()) || h != std::floor(h))
        throw IoError(what + ": reconstruction symbol out of range");
      s.recon.table.push_back(static_cast<std::size_t>(h));
    }
    return s;
  } catch (const ProbError& e) {
    throw IoError(what + ": " + e.what());
  }
}

std::string format_number(double v) { return format_with(v, 12); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out_ << f;
    } else {
      out_ << '"';
      for (char c : f) {
        if (c == '"') out_ << '"';
        out_ << c;
      }
      out_ << '"';
    }
  }
  out_ << "\r\n";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw IoError("csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> parse_range(std::string_view text, std::string_view flag) {
  const auto parts = split(text, ':');
  const std::string what(flag);
  if (parts.size() != 3) throw IoError(what + ": expected a:b:step");
  const double a = parse_double(parts[0], what), b = parse_double(parts[1], what),
               step = parse_double(parts[2], what);
  if (!(step > 0.0) || !(b >= a) || !std::isfinite(a) || !std::isfinite(b))
    throw IoError(what + ": need finite a <= b and step > 0");
  const double span = (b - a) / step;
  if (span > 1e6) throw IoError(what + ": too many grid points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-6));
  std::vector<double> out;
  for (std::size_t i = 0; i <= count; ++i) out.push_back(i == count && std::fabs(a + i * step - b) <= step * 1e-6
                                                             ? b
                                                             : a + double(i) * step);
  return out;
}

}  // namespace equiregion
