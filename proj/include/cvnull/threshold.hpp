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

// Minimum of a nullifier over Gaussian states. By linearity of the trace the
// minimum over Gaussian mixtures is attained on a pure state
// |ψ_G⟩ = S(r′)D(α)|0⟩, so the search runs over (r′, Re α, Im α).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cvnull/error.hpp"
#include "cvnull/fock.hpp"
#include "cvnull/nelder_mead.hpp"
#include "cvnull/nullifier.hpp"

namespace cvnull {

inline constexpr double kMaxSqueezeParameter = 5.0;
inline constexpr double kMaxDisplacement = 10.0;
inline constexpr double kGaussianLeakageTolerance = 1e-8;

struct GaussianPureParams {
  double r_prime = 0.0;
  Complex alpha{0.0, 0.0};
};

inline bool in_search_box(const GaussianPureParams& p) {
  return std::abs(p.r_prime) <= kMaxSqueezeParameter && std::abs(p.alpha) <= kMaxDisplacement;
}

/// Representative with Re α ≥ 0; α and −α give equal values for
/// parity-symmetric nullifiers such as the kitten.
inline GaussianPureParams canonical(GaussianPureParams p) {
  if (p.alpha.real() < 0.0 || (p.alpha.real() == 0.0 && p.alpha.imag() < 0.0)) p.alpha = -p.alpha;
  return p;
}

/// Fock vector of S(r′)D(α)|0⟩ on |0⟩…|D−1⟩. Throws increase-cutoff when the
/// population at or above level D−2 exceeds `leakage_tolerance`.
inline CVector gaussian_state_vector(const GaussianPureParams& p, int dim,
                                     double leakage_tolerance = kGaussianLeakageTolerance) {
  detail::require_dim(dim);
  const int length = std::max(3 * dim, dim + 64);
  const CVector full = squeezed_coherent_amplitudes(p.r_prime, p.alpha, length);
  const double leak = full.tail(length - (dim - 2)).squaredNorm();
  if (!(leak <= leakage_tolerance)) {
    throw Error(ErrorCode::kIncreaseCutoff,
                "Gaussian state leaks " + format_number(leak) + " past cutoff " + std::to_string(dim));
  }
  const CVector head = full.head(dim);
  return head / head.norm();
}

inline double gaussian_expectation(const GaussianPureParams& p, const FockOperator& op,
                                   double leakage_tolerance = kGaussianLeakageTolerance) {
  if (!in_search_box(p)) throw Error(ErrorCode::kInvalidParameter, "Gaussian parameters outside search box");
  return expectation(gaussian_state_vector(p, op.dim(), leakage_tolerance), op);
}

struct RestartRecord {
  GaussianPureParams start;
  GaussianPureParams end;
  double value;
  int iterations;
  bool converged;
};

struct ThresholdOptions {
  NelderMeadOptions optimizer{};
  double spread_tolerance = 1e-4;
  double leakage_tolerance = kGaussianLeakageTolerance;
};

struct ThresholdResult {
  double min_value = std::numeric_limits<double>::quiet_NaN();
  GaussianPureParams argmin{};
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
  double top3_spread = std::numeric_limits<double>::quiet_NaN();
  std::vector<RestartRecord> runs;
  /// Heterodyne only: the same objective minimized with r′ free as well.
  double unrestricted_min = std::numeric_limits<double>::quiet_NaN();
};

inline void require_converged(const ThresholdResult& r) {
  if (!r.converged) {
    throw Error(ErrorCode::kOptimizerFailed, "no consensus across restarts (top-3 spread " +
                                                 format_number(r.top3_spread) + ", best " +
                                                 format_number(r.min_value) + ")");
  }
}

namespace detail {

inline constexpr double kInfeasiblePenalty = 1e3;

/// Objective with a penalty outside the box or past the cutoff, so the
/// simplex is pushed back instead of aborting the restart.
inline double penalized_expectation(const GaussianPureParams& p, const FockOperator& op, double leakage_tol) {
  const double excess = std::max(0.0, std::abs(p.r_prime) - kMaxSqueezeParameter) +
                        std::max(0.0, std::abs(p.alpha) - kMaxDisplacement);
  if (excess > 0.0) return kInfeasiblePenalty * (1.0 + excess);
  try {
    return expectation(gaussian_state_vector(p, op.dim(), leakage_tol), op);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kIncreaseCutoff) throw;
    return kInfeasiblePenalty * (1.0 + std::abs(p.r_prime) + std::abs(p.alpha));
  }
}

/// Runs one Nelder–Mead per start (fixed order) and reduces to the best.
inline ThresholdResult multistart(const FockOperator& op, const std::vector<GaussianPureParams>& starts,
                                  bool free_squeeze, const ThresholdOptions& opts) {
  ThresholdResult out;
  auto to_params = [&](const std::vector<double>& v) {
    return free_squeeze ? GaussianPureParams{v[0], Complex(v[1], v[2])}
                        : GaussianPureParams{0.0, Complex(v[0], v[1])};
  };
  for (const auto& s : starts) {
    std::vector<double> x0 = free_squeeze ? std::vector<double>{s.r_prime, s.alpha.real(), s.alpha.imag()}
                                          : std::vector<double>{s.alpha.real(), s.alpha.imag()};
    const std::vector<double> step(x0.size(), 0.25);
    const auto nm = nelder_mead(
        [&](const std::vector<double>& v) { return penalized_expectation(to_params(v), op, opts.leakage_tolerance); },
        x0, step, opts.optimizer);
    out.runs.push_back({s, canonical(to_params(nm.x)), nm.value, nm.iterations, nm.converged});
    out.iterations += nm.iterations;
  }
  out.restarts = static_cast<int>(out.runs.size());
  std::vector<double> values;
  for (const auto& r : out.runs) values.push_back(r.value);
  std::sort(values.begin(), values.end());
  const auto best = std::min_element(out.runs.begin(), out.runs.end(),
                                     [](const auto& a, const auto& b) { return a.value < b.value; });
  out.min_value = best->value;
  out.argmin = best->end;
  out.top3_spread = values.size() >= 3 ? values[2] - values[0] : 0.0;
  out.converged = best->converged && out.top3_spread < opts.spread_tolerance &&
                  out.min_value < kInfeasiblePenalty;
  return out;
}

}  // namespace detail

/// Deterministic start grid: r′ ∈ {−0.6, −0.2, 0.2, 0.6} × |α| ∈ {0.4, 1.0, 1.6}
/// × arg α ∈ {0, π/2} (24 restarts).
inline std::vector<GaussianPureParams> homodyne_start_grid() {
  std::vector<GaussianPureParams> g;
  for (double r : {-0.6, -0.2, 0.2, 0.6})
    for (double mag : {0.4, 1.0, 1.6})
      for (double arg : {0.0, std::numbers::pi / 2}) g.push_back({r, std::polar(mag, arg)});
  return g;
}

/// |α| ∈ {0.2, 0.5, 0.8, 1.2, 1.6} × arg α ∈ {0, π/2, π, 3π/2} (20 restarts).
inline std::vector<GaussianPureParams> displacement_start_grid() {
  std::vector<GaussianPureParams> g;
  for (double mag : {0.2, 0.5, 0.8, 1.2, 1.6})
    for (int q = 0; q < 4; ++q) g.push_back({0.0, std::polar(mag, q * std::numbers::pi / 2)});
  return g;
}

/// min over S(r′)D(α)|0⟩ of ⟨op⟩. `op` must be positive semidefinite.
inline ThresholdResult minimize_homodyne_threshold(const FockOperator& op, const ThresholdOptions& opts = {}) {
  return detail::multistart(op, homodyne_start_grid(), true, opts);
}

/// Heterodyne threshold of the kitten nullifier: the antinormal function
/// |α|⁴ − 5|α|² + 4 averaged over Q, minimized with the squeezing absorbed
/// into the nullifier frame (r′ = 0, search over α). The same objective with
/// r′ free is reported in `unrestricted_min`; it coincides with the homodyne
/// minimum because the antinormal form equals (n−1)² exactly.
inline ThresholdResult minimize_heterodyne_threshold(int dim = kDefaultSingleModeCutoff,
                                                     const ThresholdOptions& opts = {}) {
  const FockOperator op = antinormal_observable(kitten_heterodyne_form(), dim);
  ThresholdResult res = detail::multistart(op, displacement_start_grid(), false, opts);
  res.unrestricted_min = detail::multistart(op, homodyne_start_grid(), true, opts).min_value;
  return res;
}

}  // namespace cvnull
