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

// Imperfect photon-subtracted squeezed sources and two-mode cluster
// assembly, plus the two parameter sweeps built on them: nullifier value over
// detector efficiency × antisqueezing, and over a mismatched untwisting
// beam splitter.

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cvnull/error.hpp"
#include "cvnull/fock.hpp"
#include "cvnull/nullifier.hpp"
#include "cvnull/symplectic.hpp"
#include "cvnull/weyl.hpp"

namespace cvnull {

inline constexpr double kGaussianThreshold = 0.611;
inline constexpr double kDefaultTapTransmissivity = 0.97;
inline constexpr double kSourceLeakageTolerance = 1e-8;

struct SourceSpec {
  double squeeze_db = -2.0;
  double antisqueeze_db = 2.0;
  double tap_t = kDefaultTapTransmissivity;
  double eta = 1.0;
};

/// Pure squeezing scale g (Var x = g/2) and amplitude transmissivity t whose
/// composition reproduces the target variances.
struct ImpureSqueezing {
  double g;
  double t;
};

/// Solves t²g/2 + (1−t²)/2 = V_x, t²/(2g) + (1−t²)/2 = V_p.
inline ImpureSqueezing solve_impure_squeezing(double squeeze_db, double antisqueeze_db) {
  const double vx = db_inverse(squeeze_db);
  const double vp = db_inverse(antisqueeze_db);
  if (vx * vp < 0.25 * (1.0 - 1e-12)) {
    throw Error(ErrorCode::kUnphysicalSpec, "variances violate V_x V_p >= 1/4");
  }
  const double a = 2.0 * vx - 1.0;
  const double b = 2.0 * vp - 1.0;
  if (std::abs(a) < 1e-14 && std::abs(b) < 1e-14) return {1.0, 1.0};
  if (!(a < 0.0 && b > 0.0)) {
    throw Error(ErrorCode::kUnphysicalSpec,
                "need V_x < 1/2 < V_p to reach the target by pure squeezing followed by loss");
  }
  const double g = -a / b;
  const double t2 = a / (g - 1.0);
  if (t2 > 1.0 + 1e-9) throw Error(ErrorCode::kUnphysicalSpec, "no transmissivity in [0,1] reaches the target");
  return {g, std::sqrt(std::min(1.0, t2))};
}

/// Squeeze by g then lose 1−t². The pure stage is built in a working space
/// large enough to hold the squeezed vacuum, then cropped to `dim`; throws
/// increase-cutoff if the cropped state leaks more than 1e−8.
inline DensityOperator impure_squeezed(double squeeze_db, double antisqueeze_db, int dim) {
  detail::require_dim(dim);
  const auto [g, t] = solve_impure_squeezing(squeeze_db, antisqueeze_db);
  const double r = squeeze_r_for_variance_scale(g);
  const int max_work = 600;
  CVector amps = squeezed_coherent_amplitudes(r, Complex(0.0, 0.0), max_work);
  int work = dim;
  while (work < max_work && amps.tail(max_work - work).squaredNorm() > 1e-15) work += 10;
  work = std::min(work, max_work);
  const CVector head = amps.head(work) / amps.head(work).norm();
  const DensityOperator lossy = loss_channel(DensityOperator::pure(head), t);
  const CMatrix& m = lossy.matrix();
  const double kept = m.topLeftCorner(dim, dim).trace().real();
  if (1.0 - kept > kSourceLeakageTolerance) {
    throw Error(ErrorCode::kIncreaseCutoff, "impure squeezed state leaks " + format_number(1.0 - kept) +
                                                " past cutoff " + std::to_string(dim));
  }
  return DensityOperator::normalized(m.topLeftCorner(dim, dim));
}

/// Tap beam splitter (vacuum ancilla) plus on/off herald with efficiency η,
/// evaluated as Σ_k π_k E_k ρ E_k† with π_k = 1 − (1−η)^k.
inline HeraldedState photon_subtract(const DensityOperator& rho, double tap_t, double eta) {
  if (!(tap_t > 0.0 && tap_t <= 1.0)) throw Error(ErrorCode::kInvalidTransmissivity, "tap transmissivity outside (0,1]");
  const HeraldPovm povm(eta, rho.dim());
  const CMatrix out = detail::weighted_loss(rho.matrix(), tap_t, povm.eigenvalues());
  const double prob = out.trace().real();
  if (!(prob >= kHeraldProbabilityFloor)) {
    throw Error(ErrorCode::kHeraldImpossible, "herald probability " + format_number(prob) + " below 1e-12");
  }
  return {DensityOperator::normalized(out / prob), prob};
}

// ---------------------------------------------------------------------------
// Sources and networks

struct VacuumSource {};

/// S(r)|1⟩ followed by intensity loss `loss` (amplitude t = √(1−loss)).
struct KittenSource {
  double r = 0.0;
  double loss = 0.0;
};

/// D(α)S(r)|0⟩ followed by intensity loss.
struct GaussianSource {
  double r = 0.0;
  Complex alpha{0.0, 0.0};
  double loss = 0.0;
};

using Source = std::variant<VacuumSource, KittenSource, GaussianSource, SourceSpec>;

inline double amplitude_for_loss(double loss) {
  if (!(loss >= 0.0 && loss <= 1.0)) throw Error(ErrorCode::kInvalidParameter, "loss must lie in [0,1]");
  return std::sqrt(1.0 - loss);
}

inline DensityOperator source_state(const Source& source, int dim) {
  return std::visit(
      [dim](const auto& s) -> DensityOperator {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, VacuumSource>) {
          return DensityOperator::vacuum(dim);
        } else if constexpr (std::is_same_v<S, KittenSource>) {
          const auto k = apply_gate(Squeeze{s.r}, DensityOperator::fock(1, dim));
          return loss_channel(DensityOperator::normalized(k.matrix()), amplitude_for_loss(s.loss));
        } else if constexpr (std::is_same_v<S, GaussianSource>) {
          const auto g = apply_gate(Displace{s.alpha}, apply_gate(Squeeze{s.r}, DensityOperator::vacuum(dim)));
          return loss_channel(DensityOperator::normalized(g.matrix()), amplitude_for_loss(s.loss));
        } else {
          return photon_subtract(impure_squeezed(s.squeeze_db, s.antisqueeze_db, dim), s.tap_t, s.eta).state;
        }
      },
      source);
}

/// Phase on mode 2, beam splitter t, phase on mode 2.
struct PassiveNetwork {
  double phase_before = 0.0;
  double t = 1.0 / std::numbers::sqrt2;
  double phase_after = 0.0;

  SymplecticTransform symplectic() const { return two_mode_network_sym(phase_before, t, phase_after); }

  TwoModeOperator unitary(int dim) const {
    const auto before = embed(gate_unitary(PhaseShift{phase_before}, dim), 1);
    const auto after = embed(gate_unitary(PhaseShift{phase_after}, dim), 1);
    return after * gate_unitary(BeamSplitter{t}, dim) * before;
  }
};

struct ClusterSpec {
  std::array<Source, 2> sources{VacuumSource{}, VacuumSource{}};
  PassiveNetwork network{};
};

inline TwoModeState assemble_cluster(const ClusterSpec& spec, int dim = kDefaultTwoModeCutoff) {
  const auto in = tensor(source_state(spec.sources[0], dim), source_state(spec.sources[1], dim));
  return apply_unitary(spec.network.unitary(dim), in);
}

// ---------------------------------------------------------------------------
// Kitten nullifier as a function of the frame g

/// Moments entering ¼[g⁴⟨x⁴⟩ + g⁻⁴⟨p⁴⟩ + 2⟨:x²p²:_W⟩ − 6g²⟨x²⟩ − 6g⁻²⟨p²⟩ + 8].
struct KittenMoments {
  double x4, p4, x2p2, x2, p2;

  double value(double g) const {
    const double g2 = g * g;
    const double g4 = g2 * g2;
    return 0.25 * (g4 * x4 + p4 / g4 + 2.0 * x2p2 - 6.0 * g2 * x2 - 6.0 * p2 / g2 + 8.0);
  }
};

inline KittenMoments kitten_moments(const DensityOperator& rho) {
  const int d = rho.dim();
  const double half_pi = std::numbers::pi / 2;
  return {expectation(rho, quadrature_power(0.0, 4, d)), expectation(rho, quadrature_power(half_pi, 4, d)),
          expectation(rho, weyl_operator_oracle({2, 2}, d)), expectation(rho, quadrature_power(0.0, 2, d)),
          expectation(rho, quadrature_power(half_pi, 2, d))};
}

struct FrameOptimum {
  double g;
  double value;
};

inline constexpr double kFrameMin = 0.2;
inline constexpr double kFrameMax = 5.0;

/// min over g ∈ [0.2, 5]: grid scan in ln g, then Brent around the best node.
inline FrameOptimum optimal_frame(const KittenMoments& m) {
  const double lo = std::log(kFrameMin);
  const double hi = std::log(kFrameMax);
  const int nodes = 64;
  const double h = (hi - lo) / nodes;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= nodes; ++i) {
    const double v = m.value(std::exp(lo + i * h));
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = lo + std::max(0, best - 1) * h;
  const double b = lo + std::min(nodes, best + 1) * h;
  const auto [u, v] =
      boost::math::tools::brent_find_minima([&](double x) { return m.value(std::exp(x)); }, a, b,
                                                        std::numeric_limits<double>::digits / 2);
  return v < best_v ? FrameOptimum{std::exp(u), v} : FrameOptimum{std::exp(lo + best * h), best_v};
}

inline FrameOptimum optimal_frame(const DensityOperator& rho) { return optimal_frame(kitten_moments(rho)); }

// ---------------------------------------------------------------------------
// Sweep: detector efficiency × antisqueezing

struct EtaAntisqOptions {
  std::vector<double> etas;
  std::vector<double> antisqueeze_db;
  double squeeze_db = -2.0;
  double tap_t = kDefaultTapTransmissivity;
  int dim = kDefaultSingleModeCutoff;
};

struct EtaAntisqCell {
  double eta;
  double antisqueeze_db;
  double nullifier;
  double g;
  double herald_probability;
};

struct ThresholdCrossing {
  double eta;
  std::optional<double> antisqueeze_db;  // first upward crossing of 0.611 along V_A
};

struct EtaAntisqResult {
  std::vector<EtaAntisqCell> cells;  // η-major, V_A-minor, in input order
  std::vector<ThresholdCrossing> crossings;
  double tap_t;
  /// |value(D+10) − value(D)| at the cell with the largest V_A and smallest η.
  double cutoff_drift;
};

inline double subtracted_cell_value(const DensityOperator& source, double tap_t, double eta, double* g_out,
                                    double* prob_out) {
  const auto h = photon_subtract(source, tap_t, eta);
  const auto opt = optimal_frame(h.state);
  if (g_out) *g_out = opt.g;
  if (prob_out) *prob_out = h.probability;
  return opt.value;
}

inline EtaAntisqResult sweep_eta_antisq(const EtaAntisqOptions& opts) {
  if (opts.etas.empty() || opts.antisqueeze_db.empty()) throw Error(ErrorCode::kInvalidParameter, "empty grid");
  EtaAntisqResult out;
  out.tap_t = opts.tap_t;
  std::vector<DensityOperator> sources;
  for (double va : opts.antisqueeze_db) sources.push_back(impure_squeezed(opts.squeeze_db, va, opts.dim));
  for (double eta : opts.etas) {
    ThresholdCrossing crossing{eta, std::nullopt};
    for (std::size_t j = 0; j < opts.antisqueeze_db.size(); ++j) {
      EtaAntisqCell cell{eta, opts.antisqueeze_db[j], 0.0, 0.0, 0.0};
      cell.nullifier = subtracted_cell_value(sources[j], opts.tap_t, eta, &cell.g, &cell.herald_probability);
      if (j > 0 && !crossing.antisqueeze_db) {
        const auto& prev = out.cells.back();
        if (prev.nullifier < kGaussianThreshold && cell.nullifier >= kGaussianThreshold) {
          const double f = (kGaussianThreshold - prev.nullifier) / (cell.nullifier - prev.nullifier);
          crossing.antisqueeze_db = prev.antisqueeze_db + f * (cell.antisqueeze_db - prev.antisqueeze_db);
        }
      }
      out.cells.push_back(cell);
    }
    out.crossings.push_back(crossing);
  }
  const auto va_max = std::max_element(opts.antisqueeze_db.begin(), opts.antisqueeze_db.end());
  const auto eta_min = std::min_element(opts.etas.begin(), opts.etas.end());
  const std::size_t j = static_cast<std::size_t>(va_max - opts.antisqueeze_db.begin());
  const std::size_t i = static_cast<std::size_t>(eta_min - opts.etas.begin());
  const double coarse = out.cells[i * opts.antisqueeze_db.size() + j].nullifier;
  const double fine = subtracted_cell_value(impure_squeezed(opts.squeeze_db, *va_max, opts.dim + 10), opts.tap_t,
                                            *eta_min, nullptr, nullptr);
  out.cutoff_drift = std::abs(fine - coarse);
  return out;
}

// ---------------------------------------------------------------------------
// Sweep: mismatched untwisting

struct MismatchOptions {
  std::vector<double> deltas;
  std::vector<double> losses{0.0, 0.10, 0.20};
  double kitten_r = 0.3;
  int dim = 20;
};

struct MismatchPoint {
  double delta;
  double loss;
  double nullifier;
};

/// Two lossy kittens S(r)|1⟩ on a balanced beam splitter; the mode-1
/// nullifier O(e^r) is untwisted assuming transmissivity 1/√2 + Δ.
/// Loss-major, Δ-minor.
inline std::vector<MismatchPoint> sweep_mismatch(const MismatchOptions& opts) {
  if (opts.deltas.empty()) throw Error(ErrorCode::kInvalidParameter, "empty delta grid");
  const double t0 = 1.0 / std::numbers::sqrt2;
  for (double d : opts.deltas) {
    if (!(t0 + d > 0.0 && t0 + d < 1.0)) throw Error(ErrorCode::kInvalidTransmissivity, "1/sqrt2 + delta outside (0,1)");
  }
  const auto op = kitten_nullifier_fock(kitten_frame_for_r(opts.kitten_r), opts.dim);
  const auto embedded = embed(op, 0);
  std::vector<MismatchPoint> out;
  for (double loss : opts.losses) {
    ClusterSpec spec;
    spec.sources = {KittenSource{opts.kitten_r, loss}, KittenSource{opts.kitten_r, loss}};
    spec.network = PassiveNetwork{0.0, t0, 0.0};
    const TwoModeState cluster = assemble_cluster(spec, opts.dim);
    for (double delta : opts.deltas) {
      // ⟨U′(O⊗I)U′†⟩ = Tr[(U′†ρU′)(O⊗I)]
      const TwoModeOperator u = gate_unitary(BeamSplitter{t0 + delta}, opts.dim);
      const CMatrix back = u.matrix().adjoint() * cluster.matrix() * u.matrix();
      const double v = (back.cwiseProduct(embedded.matrix().transpose())).sum().real();
      out.push_back({delta, loss, v});
    }
  }
  return out;
}

}  // namespace cvnull
