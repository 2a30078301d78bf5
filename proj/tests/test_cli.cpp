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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "equiregion/io.hpp"
#include "support/fixtures.hpp"

using namespace equiregion;
using fixtures::ThreadsEnv;

namespace {

const std::string kSamples = EQUIREGION_SAMPLES_DIR;

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / ("equiregion_cli_" + name);
  std::ofstream(p) << text;
  return p.string();
}

// Header-indexed rows.
std::vector<std::map<std::string, std::string>> table(const std::string& csv) {
  const auto rows = parse_csv(csv);
  std::vector<std::map<std::string, std::string>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::map<std::string, std::string> m;
    for (std::size_t c = 0; c < rows[0].size(); ++c) m[rows[0][c]] = rows[i].at(c);
    out.push_back(std::move(m));
  }
  return out;
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("region: monotone boundary and digest round trip") {
  const std::string src = kSamples + "/dsbs.json";
  const Run r = run({"region", "--source", src, "--r0", "0.5", "--grid", "8", "--dist-cap", "0.05"});
  REQUIRE(r.code == 0);
  auto rows = table(r.out);
  REQUIRE(rows.size() == 11);
  std::vector<std::pair<double, double>> feasible;
  const SourceSpec spec = load_source_spec(src);
  for (const auto& row : rows) {
    if (row.at("status") != "ok") continue;
    feasible.emplace_back(num(row.at("R")), num(row.at("Delta")));
    const SchemeParams s = decode_scheme(row.at("scheme_digest"), spec);
    const BoundEvaluation b = evaluate_bounds(spec.source, s, spec.distortion, num(row.at("R0")));
    CHECK(std::fabs(b.rate_min - num(row.at("R"))) <= 1e-9);
    CHECK(std::fabs(b.distortion - num(row.at("D"))) <= 1e-9);
    CHECK(std::fabs(b.equiv_max - num(row.at("Delta"))) <= 1e-9);
  }
  REQUIRE(feasible.size() >= 2);
  std::sort(feasible.begin(), feasible.end());
  for (std::size_t i = 1; i < feasible.size(); ++i) CHECK(feasible[i].second >= feasible[i - 1].second);
}

TEST_CASE("region: key-rate and distortion sweeps") {
  const std::string src = kSamples + "/dsbs.json";
  const Run k = run({"region", "--source", src, "--key-grid", "0:1:0.25", "--dist-cap", "0.05"});
  REQUIRE(k.code == 0);
  const auto kr = table(k.out);
  REQUIRE(kr.size() == 5);
  for (std::size_t i = 1; i < kr.size(); ++i) {
    const double inc = num(kr[i].at("Delta")) - num(kr[i - 1].at("Delta"));
    CHECK(inc >= 0.0);
    CHECK(inc <= 0.25 + 1e-6);
  }
  const Run d = run({"region", "--source", src, "--dist-grid", "0:0.2:0.05"});
  REQUIRE(d.code == 0);
  CHECK(table(d.out).size() == 5);
  CHECK(run({"region", "--source", src, "--dist-grid", "0:1:0.5", "--key-grid", "0:1:0.5"}).code == 2);
}

TEST_CASE("region: constant source gives one zero row") {
  const Run r = run({"region", "--source", kSamples + "/constant.json", "--r0", "0.3"});
  REQUIRE(r.code == 0);
  const auto rows = table(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("R") == "0");
  CHECK(rows[0].at("R0") == "0.3");
  CHECK(rows[0].at("D") == "0");
  CHECK(rows[0].at("Delta") == "0");
}

TEST_CASE("region: infeasible caps are rows, not errors") {
  const Run r = run({"region", "--source", kSamples + "/dsbs.json", "--rate-cap", "0", "--dist-cap", "0"});
  REQUIRE(r.code == 0);
  const auto rows = table(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("status") == "infeasible");
}

TEST_CASE("validation exits with 2 and names the field") {
  const std::string bad = temp_file("bad.json", R"({"alphabets": {"X": ["0", "1"]}, "pmf": [0.5, 0.4]})");
  const Run r = run({"region", "--source", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("pmf") != std::string::npos);
  CHECK(run({"region", "--source", "/nonexistent/spec.json"}).code == 2);
  CHECK(run({"region"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"region", "--source", kSamples + "/dsbs.json", "--r0", "-1"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("identities") {
  const Run ok = run({"identities", "--trials", "1000", "--seed", "7"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("result=PASS") != std::string::npos);
  const Run one = run({"identities", "--trials", "1", "--seed", "1"});
  CHECK(one.code == 0);
  const Run broken = run({"identities", "--trials", "5", "--seed", "7", "--break-markov"});
  CHECK(broken.code == 1);
  CHECK(broken.out.find("result=FAIL") != std::string::npos);
  CHECK(run({"identities", "--trials", "0"}).code == 2);
}

TEST_CASE("simulate: feasible configuration trends in emitted rows") {
  const Run r = run({"simulate", "--source", kSamples + "/dsbs.json", "--scheme", kSamples + "/scheme_wide.json",
                     "--n", "2,4", "--seeds", "20", "--r1", "0.5", "--r2", "0.75", "--r0", "1"});
  REQUIRE(r.code == 0);
  const auto rows = table(r.out);
  REQUIRE(rows.size() == 40);
  std::map<std::string, double> tv;
  for (const auto& row : rows) {
    CHECK(row.at("rates_feasible") == "true");
    tv[row.at("n")] += num(row.at("tv")) / 20.0;
  }
  CHECK(tv["4"] < tv["2"]);
}

TEST_CASE("simulate: side information equal to V decodes perfectly") {
  const std::string src = temp_file("yx.json", R"({"alphabets": {"X": ["0", "1"], "Y": ["0", "1"]},
                                                   "pmf": [0.4, 0, 0, 0.6]})");
  const std::string sch = temp_file("idv.json", R"({"vx": [[1, 0], [0, 1]], "uv": [[1], [1]]})");
  const Run r = run({"simulate", "--source", src, "--scheme", sch, "--n", "1", "--seeds", "3"});
  REQUIRE(r.code == 0);
  for (const auto& row : table(r.out)) {
    CHECK(num(row.at("decode_error")) == 0.0);
    CHECK(num(row.at("tv")) == 0.0);
  }
}

TEST_CASE("simulate: enumeration budget exits with 3") {
  const Run r = run({"simulate", "--source", kSamples + "/dsbs.json", "--scheme", kSamples + "/scheme_wide.json",
                     "--n", "20", "--seeds", "1"});
  CHECK(r.code == 3);
  CHECK(r.err.find("24") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("corollary commands") {
  SUBCASE("lossless with Y = Z") {
    const Run r = run({"corollary", "lossless", "--source", kSamples + "/y_equals_z.json", "--r0", "0,0.25,0.5,1"});
    REQUIRE(r.code == 0);
    const SourceSpec spec = load_source_spec(kSamples + "/y_equals_z.json");
    const double hxz = cond_entropy(spec.source, {"X"}, {"Z"});
    for (const auto& row : table(r.out)) {
      const double want = std::min(num(row.at("R0")), hxz);
      CHECK(std::fabs(num(row.at("corollary_Delta")) - want) <= 0.02);
      CHECK(std::fabs(num(row.at("general_Delta")) - want) <= 0.02);
    }
  }
  SUBCASE("no key: both forms agree") {
    const Run r = run({"corollary", "nokey", "--source", kSamples + "/dsbs.json", "--rate-grid", "0.2:0.8:0.3",
                       "--dist-cap", "0.05"});
    REQUIRE(r.code == 0);
    for (const auto& row : table(r.out)) {
      if (row.at("corollary_status") == "ok" && row.at("general_status") == "ok") {
        CHECK(std::fabs(num(row.at("corollary_Delta")) - num(row.at("general_Delta"))) <= 1e-9);
      } else {
        CHECK(row.at("corollary_status") == row.at("general_status"));
      }
    }
    CHECK(run({"corollary", "nokey", "--source", kSamples + "/dsbs.json", "--r0", "0.5"}).code == 2);
  }
  SUBCASE("no side information") {
    CHECK(run({"corollary", "nosi", "--source", kSamples + "/dsbs.json"}).code == 2);
    const Run r = run({"corollary", "nosi", "--source", kSamples + "/no_side_info.json", "--r0", "0.2",
                       "--rate-cap", "1", "--dist-cap", "0.25"});
    REQUIRE(r.code == 0);
    const auto rows = table(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(num(rows[0].at("abs_diff")) <= 0.02);
  }
  CHECK(run({"corollary", "sideways", "--source", kSamples + "/dsbs.json"}).code == 2);
}

TEST_CASE("profile: plateau then rise for a strong eavesdropper") {
  const Run r = run({"profile", "--source", kSamples + "/strong_eavesdropper.json", "--scheme",
                     kSamples + "/scheme_layered.json", "--key-grid", "0:1:0.05"});
  REQUIRE(r.code == 0);
  const auto rows = table(r.out);
  REQUIRE(rows.size() == 21);
  bool flat_then_rise = false;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double a = num(rows[i - 2].at("Delta")), b = num(rows[i - 1].at("Delta")), c = num(rows[i].at("Delta"));
    CHECK(c >= b);
    flat_then_rise = flat_then_rise || (b == a && c > b);
  }
  CHECK(flat_then_rise);
}

TEST_CASE("outputs are byte-identical across worker counts") {
  const std::vector<std::vector<std::string>> cmds = {
      {"region", "--source", kSamples + "/dsbs.json", "--key-grid", "0:1:0.25", "--dist-cap", "0.05"},
      {"identities", "--trials", "50", "--seed", "3"},
      {"simulate", "--source", kSamples + "/dsbs.json", "--scheme", kSamples + "/scheme_wide.json", "--n", "1,2",
       "--seeds", "3", "--r1", "0.5", "--r2", "0.5", "--r0", "1"},
      {"corollary", "nokey", "--source", kSamples + "/dsbs.json", "--rate-cap", "0.5", "--dist-cap", "0.05"},
      {"profile", "--source", kSamples + "/strong_eavesdropper.json", "--scheme", kSamples + "/scheme_layered.json"},
  };
  for (const auto& c : cmds) {
    Run a, b;
    {
      ThreadsEnv env("1");
      a = run(c);
    }
    {
      ThreadsEnv env("3");
      b = run(c);
    }
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
  }
}
