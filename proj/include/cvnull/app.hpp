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

#pragma once

// Command implementations behind the `cvnull` executable. Each command reads
// a RunConfig, writes its outputs under `out`, and returns a process exit
// status: 0 success/certified, 2 numerical failure, 3 not certified,
// 4 input error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cvnull/cluster.hpp"
#include "cvnull/error.hpp"
#include "cvnull/fock.hpp"
#include "cvnull/homodyne.hpp"
#include "cvnull/io.hpp"
#include "cvnull/nullifier.hpp"
#include "cvnull/threshold.hpp"

namespace cvnull {

inline constexpr std::string_view kToolVersion = "cvnull 0.1.0";

enum ExitCode : int { kExitOk = 0, kExitNumerical = 2, kExitNotCertified = 3, kExitInput = 4 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidState:
    case ErrorCode::kNonHermitianOperator:
    case ErrorCode::kNonHermitianExpectation:
    case ErrorCode::kIncreaseCutoff:
    case ErrorCode::kOptimizerFailed:
    case ErrorCode::kGridTooSmall:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

// ---------------------------------------------------------------------------
// Configuration

struct SweepConfig {
  std::vector<double> etas;
  std::vector<double> antisqueeze_db;
  double squeeze_db = -2.0;
  double tap_t = kDefaultTapTransmissivity;
  std::vector<double> deltas;
  std::vector<double> losses{0.0, 0.10, 0.20};
  double kitten_r = 0.3;
  int two_mode_cutoff = 20;
};

struct ConvergenceConfig {
  std::vector<double> r_values{0.1, 0.2};
  std::vector<std::size_t> n_samples{100, 300, 1000, 3000, 10000};
  int repeats = 100;
};

struct RunConfig {
  int cutoff = kDefaultSingleModeCutoff;
  std::uint64_t seed = 42;
  Preset preset = Preset::kEq15;
  double g = 1.0;
  bool heterodyne = false;
  bool degrees = false;
  std::filesystem::path out = ".";
  Json source = {{"type", "kitten"}, {"r", 0.2}};
  std::size_t n_samples = 10000;
  std::optional<std::vector<double>> phases;  // as configured; degrees when `degrees`
  SweepConfig sweep;
  ConvergenceConfig convergence;
};

inline std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw Error(ErrorCode::kInvalidParameter, "grid needs at least one step");
  if (steps == 1) return {lo};
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) v[i] = lo + (hi - lo) * i / (steps - 1);
  return v;
}

namespace detail {

/// Either an explicit array or {"min", "max", "steps"}.
inline std::vector<double> parse_grid(const Json& j, const std::string& name) {
  if (j.is_array()) {
    auto v = j.get<std::vector<double>>();
    if (v.empty()) throw Error(ErrorCode::kInvalidParameter, name + ": empty grid");
    return v;
  }
  if (j.is_object()) return linspace(j.at("min").get<double>(), j.at("max").get<double>(), j.at("steps").get<int>());
  throw Error(ErrorCode::kParseError, name + ": expected an array or {min, max, steps}");
}

inline void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::kParseError, where + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace detail

inline SweepConfig default_sweep_config() {
  SweepConfig s;
  s.etas = linspace(0.2, 1.0, 20);
  s.antisqueeze_db = linspace(2.0, 6.0, 20);
  s.deltas = linspace(-0.15, 0.15, 31);
  return s;
}

inline RunConfig default_run_config() {
  RunConfig c;
  c.sweep = default_sweep_config();
  return c;
}

/// Overlays a JSON document on `base`. Unknown keys are input errors.
inline RunConfig parse_run_config(const Json& j, RunConfig base = default_run_config()) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::kParseError, "config must be a JSON object");
    detail::require_keys(j,
                         {"$comment", "cutoff", "seed", "preset", "g", "heterodyne", "degrees", "out", "source",
                          "n_samples", "phases", "sweep", "convergence"},
                         "config");
    if (j.contains("cutoff")) base.cutoff = j["cutoff"].get<int>();
    if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("preset")) base.preset = parse_preset(j["preset"].get<std::string>());
    if (j.contains("g")) base.g = j["g"].get<double>();
    if (j.contains("heterodyne")) base.heterodyne = j["heterodyne"].get<bool>();
    if (j.contains("degrees")) base.degrees = j["degrees"].get<bool>();
    if (j.contains("out")) base.out = j["out"].get<std::string>();
    if (j.contains("source")) base.source = j["source"];
    if (j.contains("n_samples")) base.n_samples = j["n_samples"].get<std::size_t>();
    if (j.contains("phases")) base.phases = j["phases"].get<std::vector<double>>();
    if (j.contains("sweep")) {
      const Json& s = j["sweep"];
      detail::require_keys(s,
                           {"eta", "antisqueeze_db", "squeeze_db", "tap_t", "delta", "losses", "kitten_r",
                            "two_mode_cutoff"},
                           "sweep");
      if (s.contains("eta")) base.sweep.etas = detail::parse_grid(s["eta"], "sweep.eta");
      if (s.contains("antisqueeze_db")) base.sweep.antisqueeze_db = detail::parse_grid(s["antisqueeze_db"], "sweep.antisqueeze_db");
      if (s.contains("squeeze_db")) base.sweep.squeeze_db = s["squeeze_db"].get<double>();
      if (s.contains("tap_t")) base.sweep.tap_t = s["tap_t"].get<double>();
      if (s.contains("delta")) base.sweep.deltas = detail::parse_grid(s["delta"], "sweep.delta");
      if (s.contains("losses")) base.sweep.losses = detail::parse_grid(s["losses"], "sweep.losses");
      if (s.contains("kitten_r")) base.sweep.kitten_r = s["kitten_r"].get<double>();
      if (s.contains("two_mode_cutoff")) base.sweep.two_mode_cutoff = s["two_mode_cutoff"].get<int>();
    }
    if (j.contains("convergence")) {
      const Json& c = j["convergence"];
      detail::require_keys(c, {"r", "n_samples", "repeats"}, "convergence");
      if (c.contains("r")) base.convergence.r_values = c["r"].get<std::vector<double>>();
      if (c.contains("n_samples")) base.convergence.n_samples = c["n_samples"].get<std::vector<std::size_t>>();
      if (c.contains("repeats")) base.convergence.repeats = c["repeats"].get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  return base;
}

/// Range checks applied once all overrides are in.
inline void validate(const RunConfig& c) {
  if (c.cutoff < 4 || c.cutoff > 200) throw Error(ErrorCode::kInvalidDimension, "cutoff must lie in [4, 200]");
  if (!(c.g > 0.0) || !std::isfinite(c.g)) throw Error(ErrorCode::kInvalidParameter, "g must be positive");
  if (c.n_samples < 2) throw Error(ErrorCode::kInsufficientData, "n_samples must be >= 2");
  if (!(c.sweep.tap_t > 0.0 && c.sweep.tap_t <= 1.0)) throw Error(ErrorCode::kInvalidTransmissivity, "sweep.tap_t outside (0,1]");
  for (double e : c.sweep.etas)
    if (!(e >= 0.0 && e <= 1.0)) throw Error(ErrorCode::kInvalidParameter, "sweep.eta outside [0,1]");
  for (double l : c.sweep.losses)
    if (!(l >= 0.0 && l < 1.0)) throw Error(ErrorCode::kInvalidParameter, "sweep.losses outside [0,1)");
  if (c.sweep.two_mode_cutoff < 4 || c.sweep.two_mode_cutoff > 40) {
    throw Error(ErrorCode::kInvalidDimension, "sweep.two_mode_cutoff must lie in [4, 40]");
  }
  if (c.convergence.repeats < 2) throw Error(ErrorCode::kInsufficientData, "convergence.repeats must be >= 2");
  for (auto n : c.convergence.n_samples)
    if (n < 2) throw Error(ErrorCode::kInsufficientData, "convergence.n_samples entries must be >= 2");
}

inline Json to_json(const RunConfig& c) {
  Json j = {{"cutoff", c.cutoff},
            {"seed", c.seed},
            {"preset", to_string(c.preset)},
            {"g", c.g},
            {"heterodyne", c.heterodyne},
            {"degrees", c.degrees},
            {"source", c.source},
            {"n_samples", c.n_samples}};
  if (c.phases) j["phases"] = *c.phases;
  j["sweep"] = {{"eta", c.sweep.etas},
                {"antisqueeze_db", c.sweep.antisqueeze_db},
                {"squeeze_db", c.sweep.squeeze_db},
                {"tap_t", c.sweep.tap_t},
                {"delta", c.sweep.deltas},
                {"losses", c.sweep.losses},
                {"kitten_r", c.sweep.kitten_r},
                {"two_mode_cutoff", c.sweep.two_mode_cutoff}};
  j["convergence"] = {{"r", c.convergence.r_values},
                      {"n_samples", c.convergence.n_samples},
                      {"repeats", c.convergence.repeats}};
  return j;
}

inline Json provenance(const RunConfig& c, std::string_view command, const Json& inputs = Json::array()) {
  return {{"tool_version", kToolVersion},
          {"command", command},
          {"seed", c.seed},
          {"cutoff", c.cutoff},
          {"inputs", inputs},
          {"config", to_json(c)}};
}

inline std::vector<double> configured_phases(const RunConfig& c) {
  if (!c.phases) return preset_phases(c.preset);
  std::vector<double> out = *c.phases;
  if (c.degrees)
    for (double& p : out) p *= std::numbers::pi / 180.0;
  return out;
}

// ---------------------------------------------------------------------------
// Sources

namespace detail {

inline Source parse_single_source(const Json& s) {
  const std::string type = s.at("type").get<std::string>();
  if (type == "vacuum") {
    require_keys(s, {"type"}, "source");
    return VacuumSource{};
  }
  if (type == "kitten") {
    require_keys(s, {"type", "r", "loss"}, "source");
    return KittenSource{s.value("r", 0.0), s.value("loss", 0.0)};
  }
  if (type == "gaussian") {
    require_keys(s, {"type", "r", "alpha", "loss"}, "source");
    Complex alpha{0.0, 0.0};
    if (s.contains("alpha")) {
      const auto a = s["alpha"].get<std::vector<double>>();
      if (a.size() != 2) throw Error(ErrorCode::kParseError, "source.alpha must be [re, im]");
      alpha = {a[0], a[1]};
    }
    return GaussianSource{s.value("r", 0.0), alpha, s.value("loss", 0.0)};
  }
  if (type == "subtracted") {
    require_keys(s, {"type", "squeeze_db", "antisqueeze_db", "tap_t", "eta"}, "source");
    SourceSpec spec;
    spec.squeeze_db = s.value("squeeze_db", spec.squeeze_db);
    spec.antisqueeze_db = s.value("antisqueeze_db", spec.antisqueeze_db);
    spec.tap_t = s.value("tap_t", spec.tap_t);
    spec.eta = s.value("eta", spec.eta);
    return spec;
  }
  throw Error(ErrorCode::kParseError, "unknown source type '" + type + "'");
}

}  // namespace detail

/// Single-mode state to sample. A "cluster" source is two sources through a
/// passive network, untwisted with a possibly different transmissivity; the
/// result is the reduced state of the untwisted `mode`.
inline DensityOperator build_source_state(const Json& s, int cutoff) {
  try {
    if (s.at("type").get<std::string>() != "cluster") return source_state(detail::parse_single_source(s), cutoff);
    detail::require_keys(s, {"type", "sources", "network", "untwist_t", "mode", "cutoff"}, "source");
    const auto& srcs = s.at("sources");
    if (!srcs.is_array() || srcs.size() != 2) throw Error(ErrorCode::kParseError, "cluster needs two sources");
    ClusterSpec spec;
    spec.sources = {detail::parse_single_source(srcs[0]), detail::parse_single_source(srcs[1])};
    spec.network = {kClusterPhaseBefore, 1.0 / std::numbers::sqrt2, kClusterPhaseAfter};
    if (s.contains("network")) {
      const auto& n = s["network"];
      detail::require_keys(n, {"phase_before", "t", "phase_after"}, "source.network");
      spec.network.phase_before = n.value("phase_before", spec.network.phase_before);
      spec.network.t = n.value("t", spec.network.t);
      spec.network.phase_after = n.value("phase_after", spec.network.phase_after);
    }
    const int dim = s.value("cutoff", 20);
    const int mode = s.value("mode", 0);
    if (mode != 0 && mode != 1) throw Error(ErrorCode::kInvalidParameter, "cluster mode must be 0 or 1");
    PassiveNetwork assumed = spec.network;
    assumed.t = s.value("untwist_t", spec.network.t);
    const TwoModeState cluster = assemble_cluster(spec, dim);
    const TwoModeOperator u = assumed.unitary(dim);
    const TwoModeState back = TwoModeState::normalized(dim, u.matrix().adjoint() * cluster.matrix() * u.matrix());
    return partial_trace(back, mode);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("source: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline Json threshold_json(const ThresholdResult& r) {
  Json runs = Json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"start", {run.start.r_prime, run.start.alpha.real(), run.start.alpha.imag()}},
                    {"end", {run.end.r_prime, run.end.alpha.real(), run.end.alpha.imag()}},
                    {"value", run.value},
                    {"iterations", run.iterations},
                    {"converged", run.converged}});
  }
  Json j = {{"min_value", r.min_value},
            {"argmin", {{"r_prime", r.argmin.r_prime}, {"alpha_re", r.argmin.alpha.real()}, {"alpha_im", r.argmin.alpha.imag()}}},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"restarts", r.restarts},
            {"top3_spread", r.top3_spread}};
  if (!std::isnan(r.unrestricted_min)) j["unrestricted_min"] = r.unrestricted_min;
  j["runs"] = runs;
  return j;
}

inline Json poly_json(const NullifierPolynomial& poly, double g, Preset preset) {
  Json terms = Json::array();
  for (const auto& t : poly.terms()) {
    terms.push_back({{"coefficient", t.coefficient}, {"theta_rad", t.theta}, {"power", t.power}});
  }
  return {{"family", "kitten"},
          {"preset", to_string(preset)},
          {"g", g},
          {"angles_rad", poly.phases()},
          {"terms", terms},
          {"constant", poly.constant()}};
}

inline Json estimate_json(const NullifierEstimate& e) {
  Json terms = Json::array();
  for (const auto& t : e.terms) {
    terms.push_back({{"theta_rad", t.moment.theta},
                     {"power", t.moment.power},
                     {"coefficient", t.coefficient},
                     {"mean", t.moment.mean},
                     {"variance_of_mean", t.moment.variance_of_mean},
                     {"count", t.moment.count}});
  }
  Json covs = Json::array();
  for (const auto& c : e.covariances) covs.push_back({{"first", c.first}, {"second", c.second}, {"covariance", c.covariance}});
  return {{"mean", e.mean},
          {"sigma", e.sigma},
          {"sigma_without_covariance", e.sigma_without_covariance},
          {"terms", terms},
          {"covariances", covs}};
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_threshold(const RunConfig& c, std::ostream& log = std::cout) {
  ThresholdResult res;
  std::string kind;
  if (c.heterodyne) {
    kind = "heterodyne";
    res = minimize_heterodyne_threshold(c.cutoff);
  } else {
    kind = "homodyne";
    res = minimize_homodyne_threshold(kitten_nullifier_fock(c.g, c.cutoff));
  }
  Json j = {{"report", "threshold"}, {"kind", kind}, {"nullifier", {{"family", "kitten"}, {"g", c.heterodyne ? 1.0 : c.g}}}};
  const Json body = threshold_json(res);
  for (const auto& [k, v] : body.items()) j[k] = v;
  j["provenance"] = provenance(c, "threshold");
  write_json_file(c.out / "threshold.json", j);
  log << kind << " threshold " << format_double(res.min_value) << (res.converged ? "" : " (not converged)") << "\n";
  return res.converged ? kExitOk : kExitNumerical;
}

inline int cmd_simulate(const RunConfig& c, std::ostream& log = std::cout) {
  const DensityOperator rho = build_source_state(c.source, c.cutoff);
  const std::vector<double> phases = configured_phases(c);
  QuadratureDataset data = simulate_dataset(rho, phases, c.n_samples, c.seed, c.source.value("type", std::string{}));
  write_dataset(c.out, data, {c.seed, c.cutoff, c.source});
  log << "wrote " << phases.size() << " phase groups of " << c.n_samples << " samples to " << c.out.string() << "\n";
  return kExitOk;
}

/// Inputs are manifest .json files or bare phase-group .csv files.
inline int cmd_certify(const RunConfig& c, const std::vector<std::string>& inputs, std::ostream& log = std::cout) {
  if (c.heterodyne) {
    throw Error(ErrorCode::kInvalidParameter, "certify works on homodyne datasets; heterodyne samples are not supported");
  }
  if (inputs.empty()) throw Error(ErrorCode::kInvalidParameter, "certify needs at least one dataset file");
  QuadratureDataset data;
  Json in = Json::array();
  std::optional<std::uint64_t> data_seed;
  for (const auto& path : inputs) {
    in.push_back(path);
    if (std::filesystem::path(path).extension() == ".json") {
      auto part = read_dataset_manifest(path);
      const Json m = read_json_file(path);
      if (m.contains("seed") && m["seed"].is_number_unsigned()) data_seed = m["seed"].get<std::uint64_t>();
      if (data.source_id.empty()) data.source_id = part.source_id;
      for (auto& g : part.groups) data.groups.push_back(std::move(g));
    } else {
      data.groups.push_back(read_group_file(path));
    }
  }
  const NullifierPolynomial poly = kitten_nullifier_poly(c.g, c.preset);
  const NullifierEstimate est = estimate_nullifier(data, poly);
  const ThresholdResult thr = minimize_homodyne_threshold(kitten_nullifier_fock(1.0, c.cutoff));
  require_converged(thr);
  const bool certified = est.mean < thr.min_value;
  Json z = nullptr;
  if (est.sigma > 0.0) z = (thr.min_value - est.mean) / est.sigma;

  Json prov = provenance(c, "certify", in);
  prov["dataset_seed"] = data_seed ? Json(*data_seed) : Json(nullptr);
  const Json report = {{"report", "certification"},
                       {"nullifier", poly_json(poly, c.g, c.preset)},
                       {"estimate", estimate_json(est)},
                       {"threshold", {{"value", thr.min_value}, {"kind", "homodyne"}, {"converged", thr.converged}}},
                       {"verdict", {{"certified", certified}, {"z", z}}},
                       {"provenance", prov}};
  write_json_file(c.out / "certification.json", report);
  log << (certified ? "certified" : "not certified") << ": mean " << format_double(est.mean) << " sigma "
      << format_double(est.sigma) << " threshold " << format_double(thr.min_value) << "\n";
  return certified ? kExitOk : kExitNotCertified;
}

inline int cmd_sweep(const RunConfig& c, const std::string& kind, std::ostream& log = std::cout) {
  if (kind == "eta-antisq") {
    EtaAntisqOptions opts{c.sweep.etas, c.sweep.antisqueeze_db, c.sweep.squeeze_db, c.sweep.tap_t, c.cutoff};
    const auto res = sweep_eta_antisq(opts);
    std::string csv = "eta,antisqueeze_db,nullifier\n";
    Json cells = Json::array();
    for (const auto& cell : res.cells) {
      csv += format_double(cell.eta) + "," + format_double(cell.antisqueeze_db) + "," + format_double(cell.nullifier) + "\n";
      cells.push_back({{"eta", cell.eta},
                       {"antisqueeze_db", cell.antisqueeze_db},
                       {"g", cell.g},
                       {"herald_probability", cell.herald_probability}});
    }
    Json crossings = Json::array();
    for (const auto& cr : res.crossings) {
      crossings.push_back({{"eta", cr.eta}, {"antisqueeze_db", cr.antisqueeze_db ? Json(*cr.antisqueeze_db) : Json(nullptr)}});
    }
    write_text_file(c.out / "sweep_eta_antisq.csv", csv);
    write_json_file(c.out / "sweep_eta_antisq.json",
                    {{"report", "sweep"},
                     {"kind", kind},
                     {"threshold", kGaussianThreshold},
                     {"squeeze_db", c.sweep.squeeze_db},
                     {"tap_t", res.tap_t},
                     {"cutoff_drift", res.cutoff_drift},
                     {"crossings", crossings},
                     {"cells", cells},
                     {"provenance", provenance(c, "sweep eta-antisq")}});
    log << "wrote " << res.cells.size() << " cells to " << (c.out / "sweep_eta_antisq.csv").string() << "\n";
    return kExitOk;
  }
  if (kind == "mismatch") {
    MismatchOptions opts{c.sweep.deltas, c.sweep.losses, c.sweep.kitten_r, c.sweep.two_mode_cutoff};
    const auto pts = sweep_mismatch(opts);
    std::string csv = "delta,loss,nullifier\n";
    for (const auto& p : pts) csv += format_double(p.delta) + "," + format_double(p.loss) + "," + format_double(p.nullifier) + "\n";
    Json minima = Json::array();
    for (double loss : c.sweep.losses) {
      const MismatchPoint* best = nullptr;
      for (const auto& p : pts)
        if (p.loss == loss && (!best || p.nullifier < best->nullifier)) best = &p;
      minima.push_back({{"loss", loss}, {"delta", best->delta}, {"nullifier", best->nullifier}});
    }
    write_text_file(c.out / "sweep_mismatch.csv", csv);
    write_json_file(c.out / "sweep_mismatch.json", {{"report", "sweep"},
                                                    {"kind", kind},
                                                    {"kitten_r", c.sweep.kitten_r},
                                                    {"two_mode_cutoff", c.sweep.two_mode_cutoff},
                                                    {"minima", minima},
                                                    {"provenance", provenance(c, "sweep mismatch")}});
    log << "wrote " << pts.size() << " points to " << (c.out / "sweep_mismatch.csv").string() << "\n";
    return kExitOk;
  }
  throw Error(ErrorCode::kInvalidParameter, "unknown sweep kind '" + kind + "' (expected eta-antisq|mismatch)");
}

inline int cmd_convergence(const RunConfig& c, std::ostream& log = std::cout) {
  std::string csv = "n_samples,mean,std,r\n";
  Json series = Json::array();
  for (std::size_t i = 0; i < c.convergence.r_values.size(); ++i) {
    const double r = c.convergence.r_values[i];
    const DensityOperator rho = source_state(KittenSource{r, 0.0}, c.cutoff);
    const auto poly = kitten_nullifier_poly(kitten_frame_for_r(r), c.preset);
    const auto rows = convergence_study(rho, poly, c.convergence.n_samples, c.convergence.repeats, derive_seed(c.seed, i));
    Json jr = Json::array();
    for (const auto& row : rows) {
      csv += std::to_string(row.n_samples) + "," + format_double(row.mean) + "," + format_double(row.std) + "," +
             format_double(r) + "\n";
      jr.push_back({{"n_samples", row.n_samples}, {"mean", row.mean}, {"std", row.std}, {"mean_reported_sigma", row.mean_reported_sigma}});
    }
    series.push_back({{"r", r}, {"rows", jr}});
  }
  write_text_file(c.out / "convergence.csv", csv);
  write_json_file(c.out / "convergence.json", {{"report", "convergence"},
                                               {"preset", to_string(c.preset)},
                                               {"repeats", c.convergence.repeats},
                                               {"series", series},
                                               {"provenance", provenance(c, "convergence")}});
  log << "wrote " << (c.out / "convergence.csv").string() << "\n";
  return kExitOk;
}

/// Runs `fn`, mapping library and I/O errors to exit statuses.
template <typename Fn>
int run_guarded(Fn&& fn, std::ostream& err = std::cerr) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: parse-error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace cvnull
