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


// Command-line front end. Precedence: built-in defaults, then --config, then
// individual flags.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cvnull/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Certify non-Gaussian states from quadrature data via nullifier thresholds", "cvnull"};
  app.set_version_flag("--version", std::string(cvnull::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<int> cutoff;
  std::optional<std::uint64_t> seed;
  std::optional<double> g;
  std::optional<std::string> preset;
  std::optional<std::string> out;
  std::string config_path;
  bool heterodyne = false;
  bool degrees = false;

  app.add_option("--cutoff", cutoff, "Fock cutoff dimension");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory");
  app.add_flag("--heterodyne", heterodyne, "heterodyne variant");
  app.add_option("--g", g, "nullifier frame g > 0");
  app.add_option("--preset", preset, "measurement angle preset")->check(CLI::IsMember({"eq15", "eq16"}));
  app.add_flag("--degrees", degrees, "configured phases are in degrees");

  auto* threshold = app.add_subcommand("threshold", "Gaussian threshold of the kitten nullifier");
  auto* certify = app.add_subcommand("certify", "estimate a nullifier from datasets and compare to the threshold");
  std::vector<std::string> inputs;
  certify->add_option("inputs", inputs, "manifest.json or phase CSV files")->required();
  auto* simulate = app.add_subcommand("simulate", "sample homodyne data from a configured source");
  auto* sweep = app.add_subcommand("sweep", "parameter sweeps");
  std::string sweep_kind;
  sweep->add_option("kind", sweep_kind, "eta-antisq | mismatch")->required();
  auto* convergence = app.add_subcommand("convergence", "estimator spread versus sample count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cvnull::kExitInput;
  }

  return cvnull::run_guarded([&]() -> int {
    cvnull::RunConfig cfg = cvnull::default_run_config();
    if (!config_path.empty()) {
      try {
        cfg = cvnull::parse_run_config(cvnull::read_json_file(config_path), cfg);
      } catch (const cvnull::Error& e) {
        throw cvnull::Error(e.code(), config_path + ": " + e.message());
      }
    }
    if (cutoff) cfg.cutoff = *cutoff;
    if (seed) cfg.seed = *seed;
    if (g) cfg.g = *g;
    if (preset) cfg.preset = cvnull::parse_preset(*preset);
    if (out) cfg.out = *out;
    if (heterodyne) cfg.heterodyne = true;
    if (degrees) cfg.degrees = true;
    cvnull::validate(cfg);

    if (threshold->parsed()) return cvnull::cmd_threshold(cfg);
    if (certify->parsed()) return cvnull::cmd_certify(cfg, inputs);
    if (simulate->parsed()) return cvnull::cmd_simulate(cfg);
    if (sweep->parsed()) return cvnull::cmd_sweep(cfg, sweep_kind);
    if (convergence->parsed()) return cvnull::cmd_convergence(cfg);
    return cvnull::kExitInput;
  });
}
