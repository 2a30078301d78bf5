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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "equiregion/io.hpp"
#include "equiregion/osrb.hpp"
#include "equiregion/region.hpp"
#include "equiregion/special_cases.hpp"

namespace equiregion::cli {

namespace {

constexpr double kIdentityTolerance = 1e-10;
constexpr double kDefaultDistCap = 0.1;
constexpr int kDefaultRateSteps = 10;

struct SearchFlags {
  int grid = 8;
  int refine = 4;
  std::size_t u_card = 2;
  std::size_t v_card = 0;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--grid", grid, "simplex grid resolution g (step 1/g)")->check(CLI::Range(1, 64));
    app->add_option("--refine", refine, "step-halving refinement passes")->check(CLI::Range(0, 30));
    app->add_option("--u-card", u_card, "|U|")->check(CLI::Range(1, 16));
    app->add_option("--v-card", v_card, "|V| (0: |X|)")->check(CLI::Range(0, 16));
    app->add_option("--seed", seed, "seed for sampled search phases");
  }

  SearchConfig config() const {
    SearchConfig s;
    s.grid = grid;
    s.refine_iters = refine;
    s.u_card = u_card;
    s.v_card = v_card;
    s.seed = seed;
    return s;
  }
};

std::string yes_no(bool b) { return b ? "true" : "false"; }
std::string status_of(SearchStatus s) { return s == SearchStatus::kOk ? "ok" : "infeasible"; }

// Writes the buffered CSV in one go so failures never leave partial files.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << text;
  if (!f) throw IoError(path + ": write failed");
}

// Rate caps 0 .. H(X) in equal steps, or the single point 0 for a constant source.
std::vector<double> default_rate_grid(const JointDist& source) {
  const double hx = entropy(source, {source.variables()[0].name()});
  if (hx < 1e-12) return {0.0};
  std::vector<double> g;
  for (int i = 0; i <= kDefaultRateSteps; ++i) g.push_back(hx * i / kDefaultRateSteps);
  return g;
}

double loose_rate_cap(const JointDist& source) {
  return std::log2(double(source.variables()[0].size()));
}

// ---- region ----

struct RegionArgs {
  std::string source, out;
  double r0 = 0.0;
  double dist_cap = kDefaultDistCap;
  std::optional<double> rate_cap;
  std::string dist_grid, rate_grid, key_grid;
  SearchFlags search;
};

int cmd_region(const RegionArgs& a, std::ostream& out, std::ostream& err) {
  const SourceSpec spec = load_source_spec(a.source);
  const int grids = !a.dist_grid.empty() + !a.rate_grid.empty() + !a.key_grid.empty();
  if (grids > 1) throw IoError("region: give at most one of --dist-grid, --rate-grid, --key-grid");
  if (a.rate_cap && (!a.rate_grid.empty())) throw IoError("region: --rate-cap conflicts with --rate-grid");

  SweepSpec sweep;
  sweep.key_rate = a.r0;
  sweep.dist_cap = a.dist_cap;
  sweep.rate_cap = a.rate_cap.value_or(loose_rate_cap(spec.source));
  if (!a.dist_grid.empty()) {
    sweep.axis = SweepAxis::kDistCap;
    sweep.grid = parse_range(a.dist_grid, "--dist-grid");
  } else if (!a.key_grid.empty()) {
    sweep.axis = SweepAxis::kKeyRate;
    sweep.grid = parse_range(a.key_grid, "--key-grid");
  } else if (!a.rate_grid.empty()) {
    sweep.axis = SweepAxis::kRateCap;
    sweep.grid = parse_range(a.rate_grid, "--rate-grid");
  } else {
    sweep.axis = SweepAxis::kRateCap;
    sweep.grid = a.rate_cap ? std::vector<double>{*a.rate_cap} : default_rate_grid(spec.source);
  }

  const auto rows = region_sweep(spec.source, spec.distortion, sweep, a.search.config());
  std::ostringstream csv;
  CsvWriter w(csv);
  w.row({"R", "R0", "D", "Delta", "rate_cap", "dist_cap", "status", "scheme_digest"});
  std::size_t infeasible = 0;
  for (const auto& r : rows) {
    if (r.status == SearchStatus::kOk) {
      w.row({format_number(r.point.rate), format_number(r.key_rate), format_number(r.point.distortion),
             format_number(r.point.equivocation), format_number(r.rate_cap), format_number(r.dist_cap), "ok",
             encode_scheme(*r.scheme)});
    } else {
      ++infeasible;
      w.row({"", format_number(r.key_rate), "", "", format_number(r.rate_cap), format_number(r.dist_cap),
             "infeasible", ""});
    }
  }
  emit(a.out, csv.str(), out);
  err << "region: " << rows.size() << " rows, " << infeasible << " infeasible\n";
  return kOk;
}

// ---- identities ----

struct IdentityArgs {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  bool break_markov = false;
};

int cmd_identities(const IdentityArgs& a, std::ostream& out) {
  const IdentitySuiteReport rep = identity_suite(a.trials, a.seed, a.break_markov);
  const bool pass = rep.worst_spread <= kIdentityTolerance;
  out << "trials=" << rep.trials << " seed=" << a.seed << " worst_spread=" << format_number(rep.worst_spread)
      << " worst_trial=" << rep.worst_trial << " tolerance=" << format_number(kIdentityTolerance)
      << " result=" << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kOk : kIdentityFailure;
}

// ---- simulate ----

struct SimulateArgs {
  std::string source, scheme, out;
  std::vector<int> n{2, 4};
  std::size_t seeds = 20;
  std::uint64_t seed_base = 0;
  BinningConfig rates;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const SourceSpec spec = load_source_spec(a.source);
  const SchemeParams scheme = load_scheme(a.scheme, spec);
  if (a.n.empty()) throw IoError("simulate: --n needs at least one blocklength");
  if (a.seeds < 1) throw IoError("simulate: --seeds must be >= 1");

  BinningConfig base = a.rates;
  base.n = 1;
  base.validate();
  const RateReport feas = rate_feasibility(spec.source, scheme, base);
  const KeyRegime regime = key_regime_selector(spec.source, scheme, base.r0);

  std::ostringstream csv;
  CsvWriter w(csv);
  w.row({"seed", "n", "r1", "r2", "rt1", "rt2", "r0", "r0_public", "rates_feasible", "final_pair", "key_regime",
         "tv", "security_gap", "decode_error", "decode_error_b", "distortion", "equivocation", "zero_key_mass"});
  std::map<int, std::array<double, 4>> means;  // tv, gap, error, equivocation
  for (int n : a.n) {
    BinningConfig cfg = base;
    cfg.n = n;
    for (std::size_t s = 0; s < a.seeds; ++s) {
      const std::uint64_t seed = a.seed_base + s;
      const ProtocolPair pair = build_protocols(spec.source, scheme, cfg, seed);
      const double tv = tv_protocols(pair), gap = security_gap(pair);
      const FiniteNPerformance perf = finite_n_performance(pair, spec.distortion);
      w.row({std::to_string(seed), std::to_string(n), format_number(cfg.r1), format_number(cfg.r2),
             format_number(cfg.rt1), format_number(cfg.rt2), format_number(cfg.r0), format_number(cfg.r0_public),
             yes_no(feas.all_seven), yes_no(feas.final_pair), to_string(regime.tag), format_number(tv),
             format_number(gap), format_number(perf.decode_error_a), format_number(perf.decode_error_b),
             format_number(perf.distortion), format_number(perf.equivocation), format_number(perf.zero_key_mass)});
      auto& m = means[n];
      m[0] += tv / double(a.seeds);
      m[1] += gap / double(a.seeds);
      m[2] += perf.decode_error_a / double(a.seeds);
      m[3] += perf.equivocation / double(a.seeds);
    }
  }
  emit(a.out, csv.str(), out);
  err << "simulate: seven constraints " << (feas.all_seven ? "hold" : "fail") << ", key regime "
      << to_string(regime.tag) << " (I(X;V|Y,U) = " << format_number(regime.threshold) << ")\n";
  for (const auto& c : feas.constraints)
    if (!c.holds) err << "  violated: " << c.relation << " (" << format_number(c.lhs) << " vs " << format_number(c.rhs) << ")\n";
  for (const auto& [n, m] : means)
    err << "  n=" << n << " mean tv=" << format_number(m[0]) << " security_gap=" << format_number(m[1])
        << " decode_error=" << format_number(m[2]) << " equivocation=" << format_number(m[3]) << "\n";
  return kOk;
}

// ---- profile ----

struct ProfileArgs {
  std::string source, scheme, out;
  std::string key_grid = "0:1:0.05";
};

int cmd_profile(const ProfileArgs& a, std::ostream& out, std::ostream& err) {
  const SourceSpec spec = load_source_spec(a.source);
  const SchemeParams scheme = load_scheme(a.scheme, spec);
  const KeyRateProfile p =
      layered_key_profile(spec.source, scheme, spec.distortion, parse_range(a.key_grid, "--key-grid"));
  std::ostringstream csv;
  CsvWriter w(csv);
  w.row({"R0", "Delta"});
  for (std::size_t i = 0; i < p.key_rates.size(); ++i)
    w.row({format_number(p.key_rates[i]), format_number(p.equivocation[i])});
  emit(a.out, csv.str(), out);
  err << "profile: V layer needs " << format_number(p.v_layer_key) << " key bits, then "
      << format_number(p.dead_bits) << " dead bits; H(X|Z,U) = " << format_number(p.h_x_given_zu)
      << ", H(X|Z) = " << format_number(p.h_x_given_z) << "\n";
  return kOk;
}

// ---- corollary ----

struct CorollaryArgs {
  std::string kind, source, out;
  std::vector<double> r0{0.0};
  std::optional<double> rate_cap;
  std::string rate_grid;
  double dist_cap = kDefaultDistCap;
  std::uint64_t budget = 20'000'000;
  SearchFlags search;
};

int cmd_corollary(const CorollaryArgs& a, std::ostream& out, std::ostream& err) {
  const SourceSpec spec = load_source_spec(a.source);
  const JointDist& src = spec.source;
  if (a.kind == "nosi" && src.variables()[1].size() != 1)
    throw IoError("corollary nosi: the source has decoder side information (|Y| = " +
                  std::to_string(src.variables()[1].size()) + "); it requires |Y| = 1");
  if (a.kind == "nokey")
    for (double r : a.r0)
      if (r != 0.0) throw IoError("corollary nokey: --r0 must be 0");
  if (a.rate_cap && !a.rate_grid.empty()) throw IoError("corollary: --rate-cap conflicts with --rate-grid");
  std::vector<double> caps = !a.rate_grid.empty() ? parse_range(a.rate_grid, "--rate-grid")
                                                  : std::vector<double>{a.rate_cap.value_or(loose_rate_cap(src))};
  if (a.kind == "lossless") caps = {std::numeric_limits<double>::quiet_NaN()};

  CorollarySearch cs;
  cs.grid = a.search.grid;
  cs.refine_iters = a.search.refine;
  cs.u_card = a.search.u_card;
  cs.v_card = a.search.v_card;
  cs.budget = a.budget;
  const SearchConfig general = a.search.config();

  std::ostringstream csv;
  CsvWriter w(csv);
  w.row({"form", "R0", "rate_cap", "dist_cap", "corollary_status", "corollary_R", "corollary_D",
         "corollary_Delta", "general_status", "general_R", "general_D", "general_Delta", "abs_diff",
         "general_scheme_digest"});
  double worst = 0.0;
  for (double r0 : a.r0) {
    for (double cap : caps) {
      CrossCheck c;
      double dcap = a.dist_cap;
      if (a.kind == "lossless") {
        c = cross_check_lossless(src, r0, cs, general);
        dcap = 0.0;
      } else if (a.kind == "nokey") {
        c = cross_check_no_key(src, spec.distortion, cap, dcap, cs, general);
      } else {
        c = cross_check_no_si(src, spec.distortion, r0, cap, dcap, cs, general);
      }
      worst = std::max(worst, c.abs_diff);
      const bool cok = c.corollary.status == SearchStatus::kOk, gok = c.general.status == SearchStatus::kOk;
      auto num = [](bool ok, double v) { return ok ? format_number(v) : std::string(); };
      w.row({a.kind, format_number(r0), std::isnan(cap) ? std::string() : format_number(cap), format_number(dcap),
             status_of(c.corollary.status), num(cok, c.corollary.rate_min), num(cok, c.corollary.distortion),
             num(cok, c.corollary.equivocation), status_of(c.general.status),
             num(gok, c.general.bounds.rate_min), num(gok, c.general.bounds.distortion),
             num(gok, c.general.equivocation), format_number(c.abs_diff),
             gok && c.general.scheme ? encode_scheme(*c.general.scheme) : std::string()});
    }
  }
  emit(a.out, csv.str(), out);
  err << "corollary " << a.kind << ": max |corollary - general| = " << format_number(worst) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate-distortion-equivocation regions for secure source coding with side information and a shared key",
               "equiregion"};
  app.require_subcommand(1);

  RegionArgs region;
  auto* r = app.add_subcommand("region", "sweep the region boundary and write CSV");
  r->add_option("--source", region.source, "source specification (JSON)")->required();
  r->add_option("--r0", region.r0, "key rate R0")->check(CLI::NonNegativeNumber);
  r->add_option("--rate-cap", region.rate_cap, "rate cap R")->check(CLI::NonNegativeNumber);
  r->add_option("--dist-cap", region.dist_cap, "distortion cap D")->check(CLI::NonNegativeNumber);
  r->add_option("--dist-grid", region.dist_grid, "sweep D over a:b:step");
  r->add_option("--rate-grid", region.rate_grid, "sweep R over a:b:step");
  r->add_option("--key-grid", region.key_grid, "sweep R0 over a:b:step");
  r->add_option("--out", region.out, "output CSV (default stdout)");
  region.search.attach(r);

  IdentityArgs ids;
  auto* i = app.add_subcommand("identities", "check the equivocation-term identities on random joints");
  i->add_option("--trials", ids.trials, "number of random joints")->check(CLI::PositiveNumber);
  i->add_option("--seed", ids.seed, "seed");
  i->add_flag("--break-markov", ids.break_markov, "test mode: draw joints that violate the Markov chain");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "exact finite-blocklength random-binning simulation");
  s->add_option("--source", sim.source, "source specification (JSON)")->required();
  s->add_option("--scheme", sim.scheme, "scheme channels (JSON)")->required();
  s->add_option("--n", sim.n, "blocklengths, comma separated")->delimiter(',')->check(CLI::PositiveNumber);
  s->add_option("--seeds", sim.seeds, "realizations per blocklength");
  s->add_option("--seed-base", sim.seed_base, "first realization seed");
  s->add_option("--r1", sim.rates.r1, "message rate R1")->check(CLI::NonNegativeNumber);
  s->add_option("--r2", sim.rates.r2, "message rate R2")->check(CLI::NonNegativeNumber);
  s->add_option("--rt1", sim.rates.rt1, "common randomness rate R~1")->check(CLI::NonNegativeNumber);
  s->add_option("--rt2", sim.rates.rt2, "common randomness rate R~2")->check(CLI::NonNegativeNumber);
  s->add_option("--r0", sim.rates.r0, "secret key rate R0")->check(CLI::NonNegativeNumber);
  s->add_option("--r0-public", sim.rates.r0_public, "revealed key part rate (LOW regime)")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--out", sim.out, "output CSV (default stdout)");

  ProfileArgs prof;
  auto* pr = app.add_subcommand("profile", "equivocation versus key rate for one fixed layered scheme");
  pr->add_option("--source", prof.source, "source specification (JSON)")->required();
  pr->add_option("--scheme", prof.scheme, "scheme channels (JSON)")->required();
  pr->add_option("--key-grid", prof.key_grid, "key rates a:b:step");
  pr->add_option("--out", prof.out, "output CSV (default stdout)");

  CorollaryArgs cor;
  auto* c = app.add_subcommand("corollary", "corollary boundary next to the general search");
  c->add_option("kind", cor.kind, "lossless | nokey | nosi")
      ->required()
      ->check(CLI::IsMember({"lossless", "nokey", "nosi"}));
  c->add_option("--source", cor.source, "source specification (JSON)")->required();
  c->add_option("--r0", cor.r0, "key rates, comma separated")->delimiter(',')->check(CLI::NonNegativeNumber);
  c->add_option("--rate-cap", cor.rate_cap, "rate cap R")->check(CLI::NonNegativeNumber);
  c->add_option("--rate-grid", cor.rate_grid, "sweep R over a:b:step");
  c->add_option("--dist-cap", cor.dist_cap, "distortion cap D")->check(CLI::NonNegativeNumber);
  c->add_option("--budget", cor.budget, "maximum grid evaluations per search");
  c->add_option("--out", cor.out, "output CSV (default stdout)");
  cor.search.attach(c);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (r->parsed()) return cmd_region(region, out, err);
    if (i->parsed()) return cmd_identities(ids, out);
    if (s->parsed()) return cmd_simulate(sim, out, err);
    if (pr->parsed()) return cmd_profile(prof, out, err);
    return cmd_corollary(cor, out, err);
  } catch (const EnumerationBudgetError& e) {
    err << "error: budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const BudgetError& e) {
    err << "error: budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ProbError& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace equiregion::cli
