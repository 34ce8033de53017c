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

// Truncated Fock-space linear algebra for one and two bosonic modes.
//
// Quadrature convention (fixed, shared by every module):
//   x = (a + a†)/√2,  p = (a − a†)/(i√2),  [x, p] = i,  Var_vac(x) = 1/2.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "cvnull/error.hpp"

namespace cvnull {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kVacuumVariance = 0.5;
inline constexpr double kDefaultLeakageTolerance = 1e-6;
inline constexpr int kDefaultSingleModeCutoff = 40;
inline constexpr int kDefaultTwoModeCutoff = 25;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kSymmetrizeTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPositivityTolerance = 1e-10;
inline constexpr double kExpectationImagTolerance = 1e-9;
inline constexpr double kHeraldProbabilityFloor = 1e-12;

namespace detail {

inline void require_dim(int dim) {
  if (dim < 2) {
    throw Error(ErrorCode::kInvalidDimension, "Fock cutoff must be >= 2, got " + std::to_string(dim));
  }
}

inline void require_transmissivity(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kInvalidTransmissivity, "transmissivity must lie in [0,1], got " + format_number(t));
  }
}

inline double hermitian_residue(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Symmetrizes (m + m†)/2 when the anti-Hermitian residue is at most
/// kSymmetrizeTolerance relative to the largest entry; otherwise throws.
inline CMatrix enforce_hermitian(const CMatrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double residue = hermitian_residue(m);
  if (residue > kSymmetrizeTolerance * scale) {
    throw Error(ErrorCode::kNonHermitianOperator,
                "anti-Hermitian residue " + format_number(residue) + " exceeds tolerance");
  }
  return 0.5 * (m + m.adjoint());
}

inline CMatrix annihilation(int dim) {
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

inline CMatrix position(int dim) {
  const CMatrix a = annihilation(dim);
  return (a + a.adjoint()) / std::numbers::sqrt2;
}

inline CMatrix momentum(int dim) {
  const CMatrix a = annihilation(dim);
  return (a - a.adjoint()) / Complex(0.0, std::numbers::sqrt2);
}

/// exp(K) for anti-Hermitian K via the eigendecomposition of the Hermitian iK.
inline CMatrix exp_antihermitian(const CMatrix& generator) {
  CMatrix h = Complex(0.0, 1.0) * generator;
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CVector phases =
      (Complex(0.0, -1.0) * es.eigenvalues().cast<Complex>()).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

class FockOperator {
 public:
  explicit FockOperator(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
      throw Error(ErrorCode::kInvalidDimension, "operator matrix must be square");
    }
    detail::require_dim(static_cast<int>(entries_.rows()));
  }

  /// Builds an operator that must be Hermitian; small residues are symmetrized.
  static FockOperator hermitian(const CMatrix& entries) {
    return FockOperator(detail::enforce_hermitian(entries));
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }
  bool is_hermitian(double tol = kHermitianTolerance) const {
    return detail::hermitian_residue(entries_) <= tol;
  }
  FockOperator adjoint() const { return FockOperator(entries_.adjoint()); }

  friend FockOperator operator*(const FockOperator& l, const FockOperator& r) {
    return FockOperator(l.entries_ * r.entries_);
  }
  friend FockOperator operator+(const FockOperator& l, const FockOperator& r) {
    return FockOperator(l.entries_ + r.entries_);
  }
  friend FockOperator operator-(const FockOperator& l, const FockOperator& r) {
    return FockOperator(l.entries_ - r.entries_);
  }
  friend FockOperator operator*(Complex s, const FockOperator& o) { return FockOperator(s * o.entries_); }

 private:
  CMatrix entries_;
};

namespace detail {

inline void validate_density(CMatrix& m, const char* what) {
  m = enforce_hermitian(m);
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTolerance) {
    throw Error(ErrorCode::kInvalidState, std::string(what) + " trace " + format_number(tr.real()) + " != 1");
  }
  const CMatrix shifted = m + kPositivityTolerance * CMatrix::Identity(m.rows(), m.cols());
  if (Eigen::LLT<CMatrix>(shifted).info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidState, std::string(what) + " has an eigenvalue below -1e-10");
  }
}

inline CMatrix normalize_trace(const CMatrix& m) {
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorCode::kInvalidState, "cannot normalize a state with non-positive trace");
  return m / tr;
}

}  // namespace detail

/// Single-mode density matrix on |0⟩…|D−1⟩. Hermitian, unit trace, PSD.
class DensityOperator {
 public:
  static DensityOperator from_matrix(CMatrix m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::kInvalidDimension, "density matrix must be square");
    detail::require_dim(static_cast<int>(m.rows()));
    detail::validate_density(m, "density operator");
    return DensityOperator(std::move(m));
  }
  static DensityOperator normalized(const CMatrix& m) { return from_matrix(detail::normalize_trace(m)); }
  static DensityOperator pure(const CVector& psi) {
    if (psi.norm() == 0.0) throw Error(ErrorCode::kInvalidState, "zero state vector");
    const CVector v = psi / psi.norm();
    return from_matrix(v * v.adjoint());
  }
  static DensityOperator fock(int n, int dim) {
    detail::require_dim(dim);
    if (n < 0 || n >= dim) throw Error(ErrorCode::kInvalidParameter, "Fock level outside cutoff");
    CVector v = CVector::Zero(dim);
    v(n) = 1.0;
    return pure(v);
  }
  static DensityOperator vacuum(int dim) { return fock(0, dim); }
  static DensityOperator thermal(double mean_photons, int dim) {
    detail::require_dim(dim);
    if (!(mean_photons >= 0.0)) throw Error(ErrorCode::kInvalidParameter, "negative mean photon number");
    CMatrix m = CMatrix::Zero(dim, dim);
    const double q = mean_photons / (1.0 + mean_photons);
    for (int k = 0; k < dim; ++k) m(k, k) = std::pow(q, k) / (1.0 + mean_photons);
    return normalized(m);
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }
  Eigen::VectorXd populations() const { return entries_.diagonal().real(); }
  /// Population of the two highest Fock levels, the truncation-leakage proxy.
  double leakage() const { return populations().tail(2).sum(); }

 private:
  explicit DensityOperator(CMatrix m) : entries_(std::move(m)) {}
  CMatrix entries_;
};

inline void require_leakage_below(const DensityOperator& rho, double tol = kDefaultLeakageTolerance) {
  if (rho.leakage() > tol) {
    throw Error(ErrorCode::kIncreaseCutoff, "truncation leakage " + format_number(rho.leakage()) +
                                                " exceeds " + format_number(tol));
  }
}

/// Operator on two modes in the basis |i⟩⊗|j⟩ ↦ index i·D + j.
class TwoModeOperator {
 public:
  TwoModeOperator(int dim_per_mode, CMatrix entries) : dim_(dim_per_mode), entries_(std::move(entries)) {
    detail::require_dim(dim_);
    if (entries_.rows() != dim_ * dim_ || entries_.cols() != dim_ * dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "two-mode operator must be D^2 x D^2");
    }
  }
  int dim_per_mode() const { return dim_; }
  const CMatrix& matrix() const { return entries_; }
  TwoModeOperator adjoint() const { return TwoModeOperator(dim_, entries_.adjoint()); }
  friend TwoModeOperator operator*(const TwoModeOperator& l, const TwoModeOperator& r) {
    if (l.dim_ != r.dim_) throw Error(ErrorCode::kDimensionMismatch, "two-mode cutoff mismatch");
    return TwoModeOperator(l.dim_, l.entries_ * r.entries_);
  }

 private:
  int dim_;
  CMatrix entries_;
};

class TwoModeState {
 public:
  static TwoModeState from_matrix(int dim_per_mode, CMatrix m) {
    detail::require_dim(dim_per_mode);
    if (m.rows() != dim_per_mode * dim_per_mode || m.cols() != m.rows()) {
      throw Error(ErrorCode::kDimensionMismatch, "two-mode state must be D^2 x D^2");
    }
    detail::validate_density(m, "two-mode state");
    return TwoModeState(dim_per_mode, std::move(m));
  }
  static TwoModeState normalized(int dim_per_mode, const CMatrix& m) {
    return from_matrix(dim_per_mode, detail::normalize_trace(m));
  }

  int dim_per_mode() const { return dim_; }
  const CMatrix& matrix() const { return entries_; }

 private:
  TwoModeState(int d, CMatrix m) : dim_(d), entries_(std::move(m)) {}
  int dim_;
  CMatrix entries_;
};

struct LadderOps {
  FockOperator a;
  FockOperator a_dagger;
  FockOperator n;
};

inline LadderOps ladder_ops(int dim) {
  detail::require_dim(dim);
  const CMatrix a = detail::annihilation(dim);
  return {FockOperator(a), FockOperator(CMatrix(a.adjoint())), FockOperator(CMatrix(a.adjoint() * a))};
}

/// X(θ) = cos θ x + sin θ p.
inline FockOperator quadrature_operator(double theta, int dim) {
  detail::require_dim(dim);
  return FockOperator::hermitian(std::cos(theta) * detail::position(dim) +
                                 std::sin(theta) * detail::momentum(dim));
}

/// X(θ)^power with exact matrix elements on the dim×dim block (computed in a
/// space padded by `power` levels, then cropped).
inline FockOperator quadrature_power(double theta, int power, int dim) {
  detail::require_dim(dim);
  if (power < 0) throw Error(ErrorCode::kInvalidParameter, "negative quadrature power");
  const int big = dim + power;
  const CMatrix x = std::cos(theta) * detail::position(big) + std::sin(theta) * detail::momentum(big);
  CMatrix acc = CMatrix::Identity(big, big);
  for (int k = 0; k < power; ++k) acc = acc * x;
  return FockOperator::hermitian(acc.topLeftCorner(dim, dim));
}

/// ⟨a^k a†^k⟩-type antinormal products, exact on the dim×dim block.
inline FockOperator antinormal_power(int k, int dim) {
  detail::require_dim(dim);
  const int big = dim + k;
  const CMatrix a = detail::annihilation(big);
  CMatrix ak = CMatrix::Identity(big, big);
  for (int i = 0; i < k; ++i) ak = ak * a;
  return FockOperator::hermitian((ak * ak.adjoint()).topLeftCorner(dim, dim));
}

// ---------------------------------------------------------------------------
// Gates

/// S(r) = exp((r/2)(a² − a†²)). Heisenberg action S†xS = e^{−r}x, so
/// S(r)|0⟩ has Var(x) = e^{−2r}/2.
struct Squeeze {
  double r;
};
/// D(α) = exp(α a† − ᾱ a).
struct Displace {
  Complex alpha;
};
/// R(θ) = exp(−iθ n); measuring x on R(θ)ρR(θ)† measures X(θ) on ρ.
struct PhaseShift {
  double theta;
};
/// U_BS = exp(−φ(a†b − ab†)), φ = arccos t.
struct BeamSplitter {
  double t;
};

using SingleModeGate = std::variant<Squeeze, Displace, PhaseShift>;

/// Squeezing parameter whose vacuum image has Var(x) = g/2.
inline double squeeze_r_for_variance_scale(double g) {
  if (!(g > 0.0)) throw Error(ErrorCode::kInvalidParameter, "variance scale must be positive");
  return -0.5 * std::log(g);
}

namespace detail {

inline int default_padding(int dim) { return std::max(dim, 20); }

inline CMatrix single_mode_generator(const SingleModeGate& gate, int dim) {
  const CMatrix a = annihilation(dim);
  const CMatrix ad = a.adjoint();
  return std::visit(
      [&](const auto& g) -> CMatrix {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, Squeeze>) {
          return 0.5 * g.r * (a * a - ad * ad);
        } else if constexpr (std::is_same_v<G, Displace>) {
          return g.alpha * ad - std::conj(g.alpha) * a;
        } else {
          CMatrix n = ad * a;
          return Complex(0.0, -g.theta) * n;
        }
      },
      gate);
}

/// One block of the beam splitter per total photon number N, on the basis
/// |k, N−k⟩ with k in [k_min, k_min + size).
struct BeamSplitterBlock {
  int total;
  int k_min;
  CMatrix unitary;
};

inline std::vector<BeamSplitterBlock> beamsplitter_blocks(double t, int dim) {
  require_transmissivity(t);
  require_dim(dim);
  const double phi = std::acos(t);
  std::vector<BeamSplitterBlock> blocks;
  for (int total = 0; total <= 2 * (dim - 1); ++total) {
    const int k_min = std::max(0, total - (dim - 1));
    const int k_max = std::min(total, dim - 1);
    const int size = k_max - k_min + 1;
    CMatrix gen = CMatrix::Zero(size, size);
    for (int i = 0; i + 1 < size; ++i) {
      const int k = k_min + i;
      // a†b |k, N−k⟩ = √(k+1)√(N−k) |k+1, N−k−1⟩
      const double amp = std::sqrt(static_cast<double>(k + 1) * (total - k));
      gen(i + 1, i) = -phi * amp;
      gen(i, i + 1) = phi * amp;
    }
    blocks.push_back({total, k_min, size == 1 ? CMatrix::Identity(1, 1) : exp_antihermitian(gen)});
  }
  return blocks;
}

inline int two_mode_index(int i, int j, int dim) { return i * dim + j; }

}  // namespace detail

/// Matrix exponential of the gate generator. Squeezing and displacement are
/// exponentiated in a space padded by `padding` levels (default max(D,20))
/// and cropped, which keeps the D×D block unitary to ~1e−12 on all but the
/// highest levels. Phase shifts are exact.
inline FockOperator gate_unitary(const SingleModeGate& gate, int dim, int padding = -1) {
  detail::require_dim(dim);
  if (std::holds_alternative<PhaseShift>(gate)) {
    const double theta = std::get<PhaseShift>(gate).theta;
    CMatrix u = CMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) u(k, k) = std::exp(Complex(0.0, -theta * k));
    return FockOperator(u);
  }
  const int big = dim + (padding < 0 ? detail::default_padding(dim) : padding);
  const CMatrix u = detail::exp_antihermitian(detail::single_mode_generator(gate, big));
  return FockOperator(u.topLeftCorner(dim, dim));
}

/// Two-mode beam splitter; exact on every total-photon-number sector N < D.
inline TwoModeOperator gate_unitary(const BeamSplitter& bs, int dim) {
  const auto blocks = detail::beamsplitter_blocks(bs.t, dim);
  CMatrix u = CMatrix::Zero(dim * dim, dim * dim);
  for (const auto& b : blocks) {
    const int size = static_cast<int>(b.unitary.rows());
    for (int r = 0; r < size; ++r) {
      const int kr = b.k_min + r;
      for (int c = 0; c < size; ++c) {
        const int kc = b.k_min + c;
        u(detail::two_mode_index(kr, b.total - kr, dim), detail::two_mode_index(kc, b.total - kc, dim)) =
            b.unitary(r, c);
      }
    }
  }
  return TwoModeOperator(dim, std::move(u));
}

inline DensityOperator apply_unitary(const FockOperator& u, const DensityOperator& rho) {
  if (u.dim() != rho.dim()) throw Error(ErrorCode::kDimensionMismatch, "gate/state cutoff mismatch");
  return DensityOperator::normalized(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

inline DensityOperator apply_gate(const SingleModeGate& gate, const DensityOperator& rho) {
  return apply_unitary(gate_unitary(gate, rho.dim()), rho);
}

inline TwoModeState apply_unitary(const TwoModeOperator& u, const TwoModeState& rho) {
  if (u.dim_per_mode() != rho.dim_per_mode()) {
    throw Error(ErrorCode::kDimensionMismatch, "gate/state cutoff mismatch");
  }
  return TwoModeState::normalized(rho.dim_per_mode(), u.matrix() * rho.matrix() * u.matrix().adjoint());
}

// ---------------------------------------------------------------------------
// Tensor structure

inline TwoModeState tensor(const DensityOperator& first, const DensityOperator& second) {
  if (first.dim() != second.dim()) throw Error(ErrorCode::kDimensionMismatch, "per-mode cutoffs differ");
  const int d = first.dim();
  CMatrix m(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) m.block(i * d, k * d, d, d) = first.matrix()(i, k) * second.matrix();
  return TwoModeState::from_matrix(d, std::move(m));
}

/// O acting on `mode` (0 or 1), identity on the other.
inline TwoModeOperator embed(const FockOperator& op, int mode) {
  const int d = op.dim();
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix m = CMatrix::Zero(d * d, d * d);
  const CMatrix& first = mode == 0 ? op.matrix() : id;
  const CMatrix& second = mode == 0 ? id : op.matrix();
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      if (first(i, k) != Complex(0.0, 0.0)) m.block(i * d, k * d, d, d) = first(i, k) * second;
  return TwoModeOperator(d, std::move(m));
}

/// Reduced state of `keep_mode`.
inline DensityOperator partial_trace(const TwoModeState& rho, int keep_mode) {
  const int d = rho.dim_per_mode();
  CMatrix out = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        out(i, j) += keep_mode == 0 ? rho.matrix()(i * d + k, j * d + k) : rho.matrix()(k * d + i, k * d + j);
      }
  return DensityOperator::normalized(out);
}

// ---------------------------------------------------------------------------
// Channels and measurement

/// Kraus operators E_k[m, n] = ⟨m, k| U_BS(t) |n, 0⟩ of the beam-splitter loss
/// channel with a vacuum ancilla traced out.
inline std::vector<CMatrix> loss_kraus(double t, int dim) {
  const auto blocks = detail::beamsplitter_blocks(t, dim);
  std::vector<CMatrix> kraus(dim, CMatrix::Zero(dim, dim));
  for (int n = 0; n < dim; ++n) {
    const auto& b = blocks[n];  // total photon number n, k_min = 0
    for (int k = 0; k <= n; ++k) kraus[k](n - k, n) = b.unitary(n - k, n);
  }
  return kraus;
}

namespace detail {

/// Σ_k w_k E_k ρ E_k† in closed form:
/// ρ′_{ij} = Σ_k w_k √(C(i+k,k) C(j+k,k)) t^{i+j} (1−t²)^k ρ_{i+k, j+k}.
inline CMatrix weighted_loss(const CMatrix& rho, double t, const Eigen::VectorXd& weights) {
  require_transmissivity(t);
  const int d = static_cast<int>(rho.rows());
  const double refl2 = 1.0 - t * t;
  // ½ log C(i+k, k)
  auto log_amp = [&](int i, int k) { return 0.5 * (std::lgamma(i + k + 1.0) - std::lgamma(i + 1.0) - std::lgamma(k + 1.0)); };
  CMatrix out = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    if (weights(k) == 0.0) continue;
    if (k > 0 && refl2 == 0.0) break;
    const double lk = k > 0 ? k * std::log(refl2) : 0.0;
    for (int i = 0; i + k < d; ++i) {
      for (int j = 0; j + k < d; ++j) {
        const int pw = i + j;
        if (t == 0.0 && pw > 0) continue;
        const double lt = pw > 0 ? pw * std::log(t) : 0.0;
        out(i, j) += weights(k) * std::exp(log_amp(i, k) + log_amp(j, k) + lt + lk) * rho(i + k, j + k);
      }
    }
  }
  return out;
}

}  // namespace detail

inline DensityOperator loss_channel(const DensityOperator& rho, double t) {
  detail::require_transmissivity(t);
  if (t == 1.0) return rho;
  return DensityOperator::normalized(detail::weighted_loss(rho.matrix(), t, Eigen::VectorXd::Ones(rho.dim())));
}

/// On/off herald with efficiency η: Π′ = 1 − Σ_k (1−η)^k |k⟩⟨k|.
class HeraldPovm {
 public:
  HeraldPovm(double eta, int dim) : eta_(eta), dim_(dim) {
    detail::require_dim(dim);
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw Error(ErrorCode::kInvalidParameter, "detector efficiency must lie in [0,1]");
    }
  }
  double eta() const { return eta_; }
  int dim() const { return dim_; }
  Eigen::VectorXd eigenvalues() const {
    Eigen::VectorXd ev(dim_);
    for (int k = 0; k < dim_; ++k) ev(k) = 1.0 - std::pow(1.0 - eta_, k);
    return ev;
  }
  FockOperator matrix() const { return FockOperator(eigenvalues().cast<Complex>().asDiagonal()); }

 private:
  double eta_;
  int dim_;
};

struct HeraldedState {
  DensityOperator state;
  double probability;
};

inline HeraldedState condition_on_herald(const TwoModeState& joint, const HeraldPovm& povm, int heralded_mode) {
  const int d = joint.dim_per_mode();
  if (povm.dim() != d) throw Error(ErrorCode::kDimensionMismatch, "POVM cutoff mismatch");
  if (heralded_mode != 0 && heralded_mode != 1) throw Error(ErrorCode::kInvalidParameter, "mode must be 0 or 1");
  const Eigen::VectorXd pi = povm.eigenvalues();
  CMatrix out = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const Complex v = heralded_mode == 1 ? joint.matrix()(i * d + k, j * d + k)
                                             : joint.matrix()(k * d + i, k * d + j);
        out(i, j) += pi(k) * v;
      }
  const double prob = out.trace().real();
  if (!(prob >= kHeraldProbabilityFloor)) {
    throw Error(ErrorCode::kHeraldImpossible, "herald probability " + format_number(prob) + " below 1e-12");
  }
  return {DensityOperator::normalized(out), prob};
}

// ---------------------------------------------------------------------------
// Expectation values

inline double expectation(const DensityOperator& rho, const FockOperator& op) {
  if (rho.dim() != op.dim()) throw Error(ErrorCode::kDimensionMismatch, "state/operator cutoff mismatch");
  const Complex v = (rho.matrix().cwiseProduct(op.matrix().transpose())).sum();
  if (std::abs(v.imag()) > kExpectationImagTolerance * std::max(1.0, std::abs(v.real()))) {
    throw Error(ErrorCode::kNonHermitianExpectation, "imaginary residue " + format_number(v.imag()));
  }
  return v.real();
}

inline double expectation(const TwoModeState& rho, const TwoModeOperator& op) {
  if (rho.dim_per_mode() != op.dim_per_mode()) {
    throw Error(ErrorCode::kDimensionMismatch, "state/operator cutoff mismatch");
  }
  const Complex v = (rho.matrix().cwiseProduct(op.matrix().transpose())).sum();
  if (std::abs(v.imag()) > kExpectationImagTolerance * std::max(1.0, std::abs(v.real()))) {
    throw Error(ErrorCode::kNonHermitianExpectation, "imaginary residue " + format_number(v.imag()));
  }
  return v.real();
}

inline double expectation(const CVector& psi, const FockOperator& op) {
  if (psi.size() != op.dim()) throw Error(ErrorCode::kDimensionMismatch, "state/operator cutoff mismatch");
  const Complex v = psi.dot(op.matrix() * psi) / psi.squaredNorm();
  if (std::abs(v.imag()) > kExpectationImagTolerance * std::max(1.0, std::abs(v.real()))) {
    throw Error(ErrorCode::kNonHermitianExpectation, "imaginary residue " + format_number(v.imag()));
  }
  return v.real();
}

inline double fidelity(const CVector& psi, const DensityOperator& rho) {
  return expectation(psi, FockOperator(rho.matrix()));
}

// ---------------------------------------------------------------------------
// Pure Gaussian states without matrix exponentials

/// Fock amplitudes of S(r)D(α)|0⟩ on |0⟩…|length−1⟩, normalized over that
/// range. The state is annihilated by a·cosh r + a†·sinh r − α, which gives
/// the recurrence cosh r √(n+1) c_{n+1} = α c_n − sinh r √n c_{n−1}.
inline CVector squeezed_coherent_amplitudes(double r, Complex alpha, int length) {
  detail::require_dim(length);
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  CVector c(length);
  c(0) = 1.0;
  c(1) = alpha * c(0) / ch;
  for (int n = 1; n + 1 < length; ++n) {
    c(n + 1) = (alpha * c(n) - sh * std::sqrt(static_cast<double>(n)) * c(n - 1)) /
               (ch * std::sqrt(static_cast<double>(n + 1)));
  }
  return c / c.norm();
}

}  // namespace cvnull
