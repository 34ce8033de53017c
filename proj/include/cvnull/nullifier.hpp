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

// Nullifiers in three representations: a Fock operator, a homodyne polynomial
// Σ c_k X(θ_k)^{n_k} + const, and a heterodyne (antinormal) function of α.
//
// The kitten nullifier with frame parameter g is
//   O(g) = S(r)(n−1)²S(r)†,  r = ln g,
// i.e. (n′−1)² with n′ built from x′ = g·x and p′ = p/g. Its nondegenerate
// ground state is S(ln g)|1⟩. In Weyl form
//   O(g) = ¼[g⁴x⁴ + g⁻⁴p⁴ + 2:x²p²:_W − 6g²x² − 6g⁻²p² + 8].

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvnull/error.hpp"
#include "cvnull/fock.hpp"
#include "cvnull/symplectic.hpp"
#include "cvnull/weyl.hpp"

namespace cvnull {

inline constexpr double kPhaseMatchTolerance = 1e-6;

struct PolynomialTerm {
  double coefficient;
  double theta;
  int power;
};

/// Σ_k c_k X(θ_k)^{n_k} + constant. Angles may repeat across terms.
class NullifierPolynomial {
 public:
  NullifierPolynomial(std::vector<PolynomialTerm> terms, double constant)
      : terms_(std::move(terms)), constant_(constant) {
    for (const auto& t : terms_) {
      if (t.power < 1) throw Error(ErrorCode::kInvalidParameter, "polynomial powers must be >= 1");
      if (!std::isfinite(t.coefficient) || !std::isfinite(t.theta)) {
        throw Error(ErrorCode::kInvalidParameter, "non-finite polynomial term");
      }
    }
  }

  const std::vector<PolynomialTerm>& terms() const { return terms_; }
  double constant() const { return constant_; }

  /// Distinct measurement phases in order of first appearance.
  std::vector<double> phases() const {
    std::vector<double> out;
    for (const auto& t : terms_) {
      bool seen = false;
      for (double th : out) seen = seen || std::abs(th - t.theta) < 1e-12;
      if (!seen) out.push_back(t.theta);
    }
    return out;
  }

 private:
  std::vector<PolynomialTerm> terms_;
  double constant_;
};

enum class Preset { kEq15, kEq16 };

inline std::string_view to_string(Preset p) { return p == Preset::kEq15 ? "eq15" : "eq16"; }

inline Preset parse_preset(std::string_view s) {
  if (s == "eq15") return Preset::kEq15;
  if (s == "eq16") return Preset::kEq16;
  throw Error(ErrorCode::kInvalidParameter, "unknown preset '" + std::string(s) + "' (expected eq15|eq16)");
}

inline AngleSet preset_quartic_angles(Preset p) {
  return p == Preset::kEq15 ? preset_angles_eq15() : preset_angles_eq16();
}

inline AngleSet preset_quadratic_angles() { return AngleSet({0.0, std::numbers::pi / 2}); }

/// Squeezing parameter of S(r) = exp((r/2)(a² − a†²)) whose kitten S(r)|1⟩ is the
/// ground state of O(g), and its inverse.
inline double kitten_r_for_frame(double g) {
  if (!(g > 0.0)) throw Error(ErrorCode::kInvalidParameter, "frame parameter g must be positive");
  return std::log(g);
}
inline double kitten_frame_for_r(double r) { return std::exp(r); }

struct KittenWeylForm {
  Eigen::VectorXd quartic;    // weights of :x^{4−l}p^l:_W, l = 0..4
  Eigen::VectorXd quadratic;  // weights of :x^{2−l}p^l:_W, l = 0..2
  double constant;
};

inline KittenWeylForm kitten_weyl_form(double g) {
  if (!(g > 0.0)) throw Error(ErrorCode::kInvalidParameter, "frame parameter g must be positive");
  const double g2 = g * g;
  const double g4 = g2 * g2;
  KittenWeylForm f;
  f.quartic = Eigen::VectorXd::Zero(5);
  f.quartic << g4 / 4.0, 0.0, 0.5, 0.0, 1.0 / (4.0 * g4);
  f.quadratic = Eigen::VectorXd::Zero(3);
  f.quadratic << -1.5 * g2, 0.0, -1.5 / g2;
  f.constant = 2.0;
  return f;
}

/// O(g) with exact matrix elements on |0⟩…|D−1⟩.
inline FockOperator kitten_nullifier_fock(double g, int dim) {
  if (!(g > 0.0)) throw Error(ErrorCode::kInvalidParameter, "frame parameter g must be positive");
  detail::require_dim(dim);
  const int big = dim + 4;
  const CMatrix x = g * detail::position(big);
  const CMatrix p = detail::momentum(big) / g;
  const CMatrix id = CMatrix::Identity(big, big);
  const CMatrix shifted = 0.5 * (x * x + p * p - id) - id;
  return FockOperator::hermitian((shifted * shifted).topLeftCorner(dim, dim));
}

/// Homodyne polynomial for O(g). The quartic Weyl part is decomposed onto the
/// preset's four angles, the quadratic part onto {0, π/2}. Weights are
/// re-derived at each g, so the polynomial refers to measured quadratures
/// directly (no operator conjugation on the data side).
inline NullifierPolynomial kitten_nullifier_poly(double g, Preset preset) {
  const KittenWeylForm form = kitten_weyl_form(g);
  const AngleSet quartic_angles = preset_quartic_angles(preset);
  const AngleSet quadratic_angles = preset_quadratic_angles();
  const Eigen::VectorXd a4 = solve_weyl_weights(form.quartic, quartic_angles);
  const Eigen::VectorXd a2 = solve_weyl_weights(form.quadratic, quadratic_angles);
  const double scale = std::max(a4.cwiseAbs().maxCoeff(), a2.cwiseAbs().maxCoeff());

  std::vector<PolynomialTerm> terms;
  for (std::size_t k = 0; k < quartic_angles.size(); ++k) {
    const double c = a4(static_cast<Eigen::Index>(k));
    if (std::abs(c) > 1e-13 * scale) terms.push_back({c, quartic_angles.angles()[k], 4});
  }
  for (std::size_t k = 0; k < quadratic_angles.size(); ++k) {
    const double c = a2(static_cast<Eigen::Index>(k));
    if (std::abs(c) > 1e-13 * scale) terms.push_back({c, quadratic_angles.angles()[k], 2});
  }
  return NullifierPolynomial(std::move(terms), form.constant);
}

/// Measurement phases a preset needs (the quartic angles; the quadratic
/// angles 0 and π/2 are always among them).
inline std::vector<double> preset_phases(Preset preset) { return preset_quartic_angles(preset).angles(); }

inline double eval_poly_on_state(const NullifierPolynomial& poly, const DensityOperator& rho) {
  double v = poly.constant();
  for (const auto& t : poly.terms()) {
    v += t.coefficient * expectation(rho, quadrature_power(t.theta, t.power, rho.dim()));
  }
  return v;
}

inline FockOperator poly_operator(const NullifierPolynomial& poly, int dim) {
  CMatrix sum = poly.constant() * CMatrix::Identity(dim, dim);
  for (const auto& t : poly.terms()) sum += t.coefficient * quadrature_power(t.theta, t.power, dim).matrix();
  return FockOperator::hermitian(sum);
}

// ---------------------------------------------------------------------------
// Heterodyne form

/// quartic·|α|⁴ + quadratic·|α|² + constant, evaluated against the Husimi Q
/// distribution. For the kitten nullifier: |α|⁴ − 5|α|² + 4.
struct HeterodyneForm {
  double quartic;
  double quadratic;
  double constant;

  double operator()(Complex alpha) const {
    const double m = std::norm(alpha);
    return quartic * m * m + quadratic * m + constant;
  }
};

inline HeterodyneForm kitten_heterodyne_form() { return {1.0, -5.0, 4.0}; }

/// The antinormally ordered operator a²a†²·quartic + aa†·quadratic + constant.
inline FockOperator antinormal_observable(const HeterodyneForm& form, int dim) {
  return FockOperator::hermitian(form.quartic * antinormal_power(2, dim).matrix() +
                                 form.quadratic * antinormal_power(1, dim).matrix() +
                                 form.constant * CMatrix::Identity(dim, dim));
}

/// ∫ O(α, ᾱ) Q(α) d²α via antinormal moments (exact in the truncated space).
inline double heterodyne_eval(const DensityOperator& rho, const HeterodyneForm& form = kitten_heterodyne_form()) {
  return expectation(rho, antinormal_observable(form, rho.dim()));
}

/// Sample mean of O(α) over heterodyne outcomes distributed as Q.
inline double heterodyne_eval(const std::vector<Complex>& samples,
                              const HeterodyneForm& form = kitten_heterodyne_form()) {
  if (samples.empty()) throw Error(ErrorCode::kInsufficientData, "no heterodyne samples");
  double s = 0.0;
  for (const auto& a : samples) s += form(a);
  return s / static_cast<double>(samples.size());
}

struct QGridOptions {
  double radius = -1.0;  // ≤ 0: √D + 7
  int radial_points = 1000;
  int angular_points = -1;  // ≤ 0: 2D + 2
};

/// Husimi Q(α) = ⟨α|ρ|α⟩/π.
inline double husimi_q(const DensityOperator& rho, Complex alpha) {
  const int d = rho.dim();
  CVector v(d);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < d; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return (v.dot(rho.matrix() * v)).real() / std::numbers::pi;
}

/// Direct 2-D integration of O(α)Q(α) on a polar grid (composite Simpson in
/// |α|, trapezoid in arg α). Throws grid-too-small when ∫Q misses 1 by more
/// than 1e−6.
inline double heterodyne_eval_integral(const DensityOperator& rho,
                                       const HeterodyneForm& form = kitten_heterodyne_form(),
                                       QGridOptions opts = {}) {
  const int d = rho.dim();
  const double radius = opts.radius > 0.0 ? opts.radius : std::sqrt(static_cast<double>(d)) + 7.0;
  const int nr = opts.radial_points + (opts.radial_points % 2);
  const int na = opts.angular_points > 0 ? opts.angular_points : 2 * d + 2;
  const double hr = radius / nr;
  const double ha = 2.0 * std::numbers::pi / na;
  double norm = 0.0;
  double value = 0.0;
  for (int i = 0; i <= nr; ++i) {
    const double rad = i * hr;
    const double w = (i == 0 || i == nr) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    double ring_q = 0.0;
    for (int j = 0; j < na; ++j) ring_q += husimi_q(rho, std::polar(rad, j * ha));
    ring_q *= ha * rad;
    norm += w * ring_q;
    value += w * ring_q * form(Complex(rad, 0.0));
  }
  norm *= hr / 3.0;
  value *= hr / 3.0;
  if (std::abs(1.0 - norm) > 1e-6) {
    throw Error(ErrorCode::kGridTooSmall, "Q-function integrates to " + format_number(norm));
  }
  return value;
}

// ---------------------------------------------------------------------------
// Gaussian cluster nullifiers and untwisting

/// N_i = p_i − Σ_{j∈N(i)} x_j for a symmetric 0/1 adjacency matrix.
inline std::vector<LinearNullifier> gaussian_nullifiers_for_graph(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n == 0) throw Error(ErrorCode::kInvalidParameter, "empty graph");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(adjacency[i].size()) != n) throw Error(ErrorCode::kInvalidParameter, "adjacency not square");
    for (int j = 0; j < n; ++j) {
      const int v = adjacency[i][j];
      if ((v != 0 && v != 1) || v != adjacency[j][i] || (i == j && v != 0)) {
        throw Error(ErrorCode::kInvalidParameter, "adjacency must be symmetric 0/1 without self-loops");
      }
    }
  }
  std::vector<LinearNullifier> out;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n);
    c(2 * i + 1) = 1.0;
    for (int j = 0; j < n; ++j)
      if (adjacency[i][j] == 1) c(2 * j) = -1.0;
    out.emplace_back(c);
  }
  return out;
}

/// U(O ⊗ I)U† for the preparation unitary U (ρ ↦ UρU†). Measured on the
/// cluster state it gives ⟨O⟩ on the pre-network input of `mode`.
inline TwoModeOperator untwist_nullifier(const FockOperator& op, const TwoModeOperator& network, int mode = 0) {
  if (op.dim() != network.dim_per_mode()) throw Error(ErrorCode::kDimensionMismatch, "cutoff mismatch");
  const TwoModeOperator embedded = embed(op, mode);
  return TwoModeOperator(op.dim(), network.matrix() * embedded.matrix() * network.matrix().adjoint());
}

}  // namespace cvnull
