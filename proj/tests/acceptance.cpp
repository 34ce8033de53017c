// Copyright 2026 The cvnull Authors
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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cvnull/app.hpp"
#include "cvnull/symplectic.hpp"
#include "cvnull/weyl.hpp"

namespace {

using namespace cvnull;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return format_number(v); }

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityOperator random_state(std::mt19937_64& rng, int dim, int support) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g = CMatrix::Zero(dim, dim);
  for (int i = 0; i < support; ++i)
    for (int j = 0; j < support; ++j) g(i, j) = Complex(n(rng), n(rng));
  return DensityOperator::normalized(g * g.adjoint());
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cvnull_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = minimize_homodyne_threshold(kitten_nullifier_fock(1.0, 40));
  const double secs = seconds_since(t0);
  const bool ok = res.converged && std::abs(res.min_value - 0.611) <= 0.005 && secs < 60.0;
  return {ok, "min " + fmt(res.min_value) + " at D=40 in " + fmt(secs) + " s"};
}

Outcome ac2() {
  const auto res = minimize_heterodyne_threshold(40);
  return {res.converged && std::abs(res.min_value - 0.75) <= 0.005, "min " + fmt(res.min_value)};
}

Outcome ac3() {
  const int d = 40;
  double worst = 0.0;
  for (double r : {0.0, 0.1, -0.1, 0.2, -0.2, 0.5, -0.5}) {
    const auto rho = apply_gate(Squeeze{r}, DensityOperator::fock(1, d));
    const double g = kitten_frame_for_r(r);
    worst = std::max(worst, std::abs(expectation(rho, kitten_nullifier_fock(g, d))));
    for (Preset p : {Preset::kEq15, Preset::kEq16}) {
      worst = std::max(worst, std::abs(eval_poly_on_state(kitten_nullifier_poly(g, p), rho)));
    }
  }
  return {worst <= 1e-7, "max |value| " + fmt(worst)};
}

Outcome ac4() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> lg(std::log(0.5), std::log(2.0));
  const int d = 30;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto rho = random_state(rng, d, 10);
    const double g = std::exp(lg(rng));
    const double op = expectation(rho, kitten_nullifier_fock(g, d));
    for (Preset p : {Preset::kEq15, Preset::kEq16}) {
      worst = std::max(worst, std::abs(eval_poly_on_state(kitten_nullifier_poly(g, p), rho) - op));
    }
  }
  return {worst <= 1e-6, "max |poly - op| " + fmt(worst) + " over 50 states"};
}

Outcome ac5() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
  const int d = 24;
  double worst = 0.0;
  int sets = 0;
  int skipped = 0;
  while (sets < 100) {
    bool solved_all = true;
    double set_worst = 0.0;
    try {
      for (int deg = 1; deg <= 6; ++deg) {
        std::vector<double> th(deg + 1);
        for (auto& t : th) t = u(rng);
        const AngleSet angles(th);
        for (int m = 0; m <= deg; ++m) {
          const WeylMonomial mono{m, deg - m};
          const auto a = solve_monomial(mono, angles);
          const auto rec = reconstruct_operator(a, angles, deg, d);
          const auto oracle = weyl_operator_oracle(mono, d);
          set_worst = std::max(set_worst, max_abs(rec.matrix() - oracle.matrix()) /
                                              std::max(1.0, max_abs(oracle.matrix())));
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateAngles) throw;
      solved_all = false;
      ++skipped;
    }
    if (solved_all) {
      worst = std::max(worst, set_worst);
      ++sets;
    }
  }
  int rejected = 0;
  const std::vector<std::vector<double>> degenerate = {
      {0.0, 0.0}, {0.3, 0.3 + kPi}, {0.1, 0.5, 0.1 + 1e-12}, {0.0, 0.4, 0.9, 1.3, 2.0, 2.5}};
  for (const auto& th : degenerate) {
    try {
      const AngleSet angles(th);
      solve_monomial({2, 2}, angles);
    } catch (const Error& e) {
      rejected += e.code() == ErrorCode::kDegenerateAngles;
    }
  }
  const bool ok = worst <= 1e-8 && rejected == static_cast<int>(degenerate.size());
  return {ok, "max rel error " + fmt(worst) + " over 100 sets (" + std::to_string(skipped) +
                  " ill-conditioned draws redrawn), degenerate rejected " + std::to_string(rejected) + "/" +
                  std::to_string(degenerate.size())};
}

CovarianceMatrix two_node_cluster_cov(double r) {
  const double g = std::exp(-2.0 * r);
  const auto squeezers = compose(squeeze_sym(g, 2, 0), squeeze_sym(g, 2, 1));
  const auto network = two_mode_network_sym(kClusterPhaseBefore, 1.0 / std::numbers::sqrt2, kClusterPhaseAfter);
  return apply(compose(network, squeezers), vacuum_cov(2));
}

Outcome ac6() {
  const auto nullifiers = gaussian_nullifiers_for_graph({{0, 1}, {1, 0}});
  double worst = 0.0;
  for (int i = 0; i <= 60; ++i) {
    const double r = -3.0 + 0.05 * i;
    const auto cov = two_node_cluster_cov(r);
    for (const auto& n : nullifiers) {
      worst = std::max(worst, std::abs(gaussian_nullifier_variance(cov, n) - std::exp(2 * r)));
    }
  }
  const auto deep = two_node_cluster_cov(-5.0);
  const double v5 = std::max(gaussian_nullifier_variance(deep, nullifiers[0]),
                             gaussian_nullifier_variance(deep, nullifiers[1]));
  return {worst <= 1e-10 && v5 < 1e-4, "max |Var - e^{2r}| " + fmt(worst) + ", r=-5 gives " + fmt(v5)};
}

Outcome ac7() {
  MismatchOptions opts;
  opts.deltas = linspace(-0.15, 0.15, 31);
  const auto pts = sweep_mismatch(opts);
  const std::size_t n = opts.deltas.size();
  bool minima_at_zero = true;
  bool ordered = true;
  double ideal_min = 0.0;
  for (std::size_t l = 0; l < opts.losses.size(); ++l) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (pts[l * n + i].nullifier < pts[l * n + best].nullifier) best = i;
    minima_at_zero = minima_at_zero && std::abs(opts.deltas[best]) < 1e-12;
    if (l == 0) ideal_min = pts[best].nullifier;
    if (l > 0)
      for (std::size_t i = 0; i < n; ++i) ordered = ordered && pts[l * n + i].nullifier > pts[(l - 1) * n + i].nullifier;
  }
  const bool ok = minima_at_zero && ordered && std::abs(ideal_min) <= 1e-6;
  return {ok, std::string("minima at 0: ") + (minima_at_zero ? "yes" : "no") + ", ordered by loss: " +
                  (ordered ? "yes" : "no") + ", ideal minimum " + fmt(ideal_min)};
}

Outcome ac8() {
  const auto t0 = std::chrono::steady_clock::now();
  EtaAntisqOptions opts;
  opts.etas = linspace(0.2, 1.0, 20);
  opts.antisqueeze_db = linspace(2.0, 6.0, 20);
  const auto res = sweep_eta_antisq(opts);
  const double secs = seconds_since(t0);
  const std::size_t ne = opts.etas.size();
  const std::size_t na = opts.antisqueeze_db.size();
  constexpr double slack = 1e-9;
  int violations = 0;
  for (std::size_t i = 0; i < ne; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const double v = res.cells[i * na + j].nullifier;
      if (j + 1 < na && res.cells[i * na + j + 1].nullifier < v - slack) ++violations;
      if (i + 1 < ne && res.cells[(i + 1) * na + j].nullifier > v + slack) ++violations;
    }
  std::optional<double> crossing;
  for (const auto& c : res.crossings)
    if (c.eta == 1.0) crossing = c.antisqueeze_db;
  const bool ok = violations == 0 && crossing && *crossing >= 3.0 && *crossing <= 4.5 && secs < 600.0;
  return {ok, "monotonicity violations " + std::to_string(violations) + ", crossing at eta=1: " +
                  (crossing ? fmt(*crossing) + " dB" : std::string("none")) + ", " + fmt(secs) + " s"};
}

struct ConvergenceData {
  std::vector<std::vector<ConvergenceRow>> series;  // r = 0.1, 0.2
};

const ConvergenceData& convergence_data() {
  static const ConvergenceData data = [] {
    ConvergenceData out;
    const std::vector<std::size_t> n_list{100, 300, 1000, 3000, 10000};
    std::uint64_t k = 0;
    for (double r : {0.1, 0.2}) {
      const auto rho = source_state(KittenSource{r, 0.0}, 40);
      const auto poly = kitten_nullifier_poly(kitten_frame_for_r(r), Preset::kEq15);
      out.series.push_back(convergence_study(rho, poly, n_list, 100, derive_seed(2024, k++)));
    }
    return out;
  }();
  return data;
}

Outcome ac9() {
  bool ok = true;
  std::ostringstream s;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& rows = convergence_data().series[i];
    const double bound = rows.back().mean + 2 * rows.back().std;
    const double ratio = rows.front().std / rows.back().std;
    ok = ok && bound < 0.611 && ratio >= 7.0 && ratio <= 13.0;
    s << (i ? "; " : "") << "r=" << (i ? "0.2" : "0.1") << ": mean+2std " << fmt(bound) << ", std ratio " << fmt(ratio);
  }
  return {ok, s.str()};
}

Outcome ac10() {
  bool ok = true;
  std::ostringstream s;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& row = convergence_data().series[i].back();
    const double ratio = row.mean_reported_sigma / row.std;
    ok = ok && std::abs(ratio - 1.0) <= 0.3;
    s << (i ? "; " : "") << "r=" << (i ? "0.2" : "0.1") << ": reported/empirical " << fmt(ratio);
  }
  return {ok, s.str()};
}

Outcome ac11() {
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int d = 20;
  double lowest = INFINITY;
  for (int trial = 0; trial < 30; ++trial) {
    ClusterSpec spec;
    for (auto& s : spec.sources) {
      s = GaussianSource{0.4 * u(rng), Complex(0.6 * u(rng), 0.6 * u(rng)), 0.3 * u01(rng)};
    }
    spec.network = {kPi * u(rng), 0.5 + 0.35 * u01(rng), kPi * u(rng)};
    const auto cluster = assemble_cluster(spec, d);
    PassiveNetwork assumed = spec.network;
    if (trial % 2 == 1) assumed.t = std::clamp(assumed.t + 0.1 * u(rng), 0.05, 0.99);
    const auto um = assumed.unitary(d).matrix();
    const auto back = TwoModeState::normalized(d, um.adjoint() * cluster.matrix() * um);
    for (int mode : {0, 1}) {
      lowest = std::min(lowest, optimal_frame(partial_trace(back, mode)).value);
    }
  }
  return {lowest >= 0.611 - 1e-3, "lowest value over 30 preparations (both modes, optimal frame) " + fmt(lowest)};
}

Outcome ac12() {
  const fs::path dir = scratch("ac12");
  std::ostringstream log;
  RunConfig c = default_run_config();
  c.seed = 1234;
  c.source = {{"type", "kitten"}, {"r", 0.1}, {"loss", 0.15}};
  c.preset = Preset::kEq16;
  c.n_samples = 10000;
  c.out = dir / "data";
  if (cmd_simulate(c, log) != kExitOk) return {false, "simulate failed"};
  c.out = dir / "report";
  c.g = kitten_frame_for_r(0.1);
  const std::string manifest = (dir / "data" / "manifest.json").string();
  const int rc = cmd_certify(c, {manifest}, log);
  const Json r = read_json_file(dir / "report" / "certification.json");

  bool structure = true;
  for (const char* k : {"report", "nullifier", "estimate", "threshold", "verdict", "provenance"}) structure &= r.contains(k);
  for (const char* k : {"preset", "g", "angles_rad"}) structure &= r["nullifier"].contains(k);
  for (const char* k : {"mean", "sigma"}) structure &= r["estimate"].contains(k);
  for (const char* k : {"value", "kind"}) structure &= r["threshold"].contains(k);
  for (const char* k : {"inputs", "seed", "cutoff", "tool_version"}) structure &= r["provenance"].contains(k);

  const double mean = r["estimate"]["mean"].get<double>();
  const double sigma = r["estimate"]["sigma"].get<double>();
  const double thr = r["threshold"]["value"].get<double>();
  const bool certified = r["verdict"]["certified"].get<bool>();
  const bool z_exact = r["verdict"]["z"].get<double>() == (thr - mean) / sigma;

  const auto data = read_dataset_manifest(manifest);
  const auto est = estimate_nullifier(data, kitten_nullifier_poly(c.g, c.preset));
  const bool recomputed = est.mean == mean && est.sigma == sigma;
  const double exact = expectation(source_state(KittenSource{0.1, 0.15}, 40), kitten_nullifier_fock(c.g, 40));

  const bool ok = structure && rc == kExitOk && certified && mean < thr && z_exact && recomputed &&
                  std::abs(mean - exact) < 4 * sigma;
  return {ok, "mean " + fmt(mean) + " +- " + fmt(sigma) + " (exact " + fmt(exact) + "), threshold " + fmt(thr) +
                  ", z " + fmt(r["verdict"]["z"].get<double>()) + ", exit " + std::to_string(rc) +
                  (z_exact ? ", z exact" : ", z MISMATCH") + (recomputed ? "" : ", estimate MISMATCH") +
                  (structure ? "" : ", structure MISSING")};
}

Outcome ac13() {
  const fs::path dir = scratch("ac13");
  std::ostringstream log;
  // Both runs write to the same path so that recorded input paths agree.
  const fs::path run = dir / "run";
  std::map<std::string, std::string> first;
  std::vector<std::string> differing;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(run);
    RunConfig c = default_run_config();
    c.seed = 77;
    c.n_samples = 2000;
    c.sweep.etas = {0.6, 1.0};
    c.sweep.antisqueeze_db = {2.0, 4.0};
    c.sweep.deltas = {-0.01, 0.0, 0.01};
    c.sweep.losses = {0.0, 0.1};
    c.sweep.two_mode_cutoff = 12;
    c.convergence.n_samples = {100, 300};
    c.convergence.repeats = 10;
    c.out = run;
    cmd_threshold(c, log);
    cmd_simulate(c, log);
    cmd_sweep(c, "eta-antisq", log);
    cmd_sweep(c, "mismatch", log);
    cmd_convergence(c, log);
    c.g = kitten_frame_for_r(0.2);
    cmd_certify(c, {(run / "manifest.json").string()}, log);
    for (const auto& entry : fs::directory_iterator(run)) {
      const std::string name = entry.path().filename().string();
      const std::string text = read_text_file(entry.path());
      if (pass == 0) {
        first[name] = text;
      } else if (first[name] != text) {
        differing.push_back(name);
      }
    }
  }
  std::string detail = std::to_string(first.size()) + " output files compared, " +
                       std::to_string(differing.size()) + " differ";
  for (const auto& n : differing) detail += " " + n;
  return {first.size() >= 10 && differing.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3},   {"AC4", ac4},   {"AC5", ac5},   {"AC6", ac6},  {"AC7", ac7},
      {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}, {"AC12", ac12}, {"AC13", ac13}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s  %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
