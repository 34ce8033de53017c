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

// Covariance-matrix bookkeeping for Gaussian states. Quadratures are ordered
// (x₁, p₁, x₂, p₂, …); a transform M acts as r′ = M r and Σ ↦ M Σ Mᵀ.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "cvnull/error.hpp"

namespace cvnull {

inline constexpr double kSymplecticTolerance = 1e-10;
inline constexpr double kUncertaintyTolerance = 1e-9;

/// Ω = ⊕ [[0, 1], [−1, 0]].
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0 || entries_.rows() == 0) {
      throw Error(ErrorCode::kInvalidDimension, "covariance matrix must be 2N x 2N");
    }
    if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw Error(ErrorCode::kInvalidState, "covariance matrix is not symmetric");
    }
    entries_ = 0.5 * (entries_ + entries_.transpose());
    // Σ + (i/2)Ω ⪰ 0
    const Eigen::MatrixXcd test =
        entries_.cast<std::complex<double>>() +
        std::complex<double>(0.0, 0.5) * symplectic_form(n_modes()).cast<std::complex<double>>();
    const double min_ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(test).eigenvalues().minCoeff();
    if (min_ev < -kUncertaintyTolerance) {
      throw Error(ErrorCode::kInvalidState, "covariance violates the uncertainty principle (min eigenvalue " +
                                                format_number(min_ev) + ")");
    }
  }

  int n_modes() const { return static_cast<int>(entries_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

class SymplecticTransform {
 public:
  explicit SymplecticTransform(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0 || entries_.rows() == 0) {
      throw Error(ErrorCode::kInvalidDimension, "symplectic transform must be 2N x 2N");
    }
    const Eigen::MatrixXd omega = symplectic_form(n_modes());
    if ((entries_ * omega * entries_.transpose() - omega).cwiseAbs().maxCoeff() > kSymplecticTolerance) {
      throw Error(ErrorCode::kInvalidParameter, "matrix is not symplectic");
    }
  }

  static SymplecticTransform identity(int n_modes) {
    return SymplecticTransform(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(entries_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

/// Coefficient vector n of N = Σ nᵢ rᵢ over (x₁, p₁, …, x_N, p_N).
class LinearNullifier {
 public:
  explicit LinearNullifier(Eigen::VectorXd coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.size() == 0 || coefficients_.size() % 2 != 0) {
      throw Error(ErrorCode::kInvalidDimension, "nullifier needs 2N coefficients");
    }
    if (coefficients_.cwiseAbs().maxCoeff() == 0.0) {
      throw Error(ErrorCode::kInvalidParameter, "nullifier has no nonzero coefficient");
    }
  }
  int n_modes() const { return static_cast<int>(coefficients_.size() / 2); }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }

 private:
  Eigen::VectorXd coefficients_;
};

inline CovarianceMatrix vacuum_cov(int n_modes) {
  if (n_modes < 1) throw Error(ErrorCode::kInvalidDimension, "need at least one mode");
  return CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

namespace detail {

inline void require_mode(int mode, int n_modes) {
  if (mode < 0 || mode >= n_modes) throw Error(ErrorCode::kInvalidParameter, "mode index out of range");
}

inline SymplecticTransform embed_block(const Eigen::Matrix2d& block, int n_modes, int mode) {
  require_mode(mode, n_modes);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  m.block<2, 2>(2 * mode, 2 * mode) = block;
  return SymplecticTransform(m);
}

}  // namespace detail

/// x ↦ √g·x, p ↦ p/√g; the vacuum maps to diag(g/2, 1/(2g)).
inline SymplecticTransform squeeze_sym(double g, int n_modes = 1, int mode = 0) {
  if (!(g > 0.0)) throw Error(ErrorCode::kInvalidParameter, "squeeze scale g must be positive");
  Eigen::Matrix2d b;
  b << std::sqrt(g), 0.0, 0.0, 1.0 / std::sqrt(g);
  return detail::embed_block(b, n_modes, mode);
}

/// Heisenberg action of exp(−iθn): x ↦ cos θ x + sin θ p, p ↦ −sin θ x + cos θ p.
inline SymplecticTransform phase_sym(double theta, int n_modes = 1, int mode = 0) {
  Eigen::Matrix2d b;
  b << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return detail::embed_block(b, n_modes, mode);
}

/// Heisenberg action of exp(−φ(a†b − ab†)), φ = arccos t:
/// a ↦ t a − √(1−t²) b,  b ↦ √(1−t²) a + t b.
inline SymplecticTransform bs_sym(double t, int n_modes = 2, int first = 0, int second = 1) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kInvalidTransmissivity, "transmissivity outside [0,1]");
  detail::require_mode(first, n_modes);
  detail::require_mode(second, n_modes);
  if (first == second) throw Error(ErrorCode::kInvalidParameter, "beam splitter needs two distinct modes");
  const double r = std::sqrt(1.0 - t * t);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  for (int q = 0; q < 2; ++q) {
    const int i = 2 * first + q;
    const int j = 2 * second + q;
    m(i, i) = t;
    m(i, j) = -r;
    m(j, i) = r;
    m(j, j) = t;
  }
  return SymplecticTransform(m);
}

/// compose(A, B) applies B first, then A.
inline SymplecticTransform compose(const SymplecticTransform& a, const SymplecticTransform& b) {
  if (a.n_modes() != b.n_modes()) throw Error(ErrorCode::kDimensionMismatch, "mode count mismatch");
  return SymplecticTransform(a.matrix() * b.matrix());
}

/// M⁻¹ = −Ω Mᵀ Ω, exact for symplectic M.
inline SymplecticTransform inverse(const SymplecticTransform& m) {
  const Eigen::MatrixXd omega = symplectic_form(m.n_modes());
  return SymplecticTransform(-omega * m.matrix().transpose() * omega);
}

/// Untwisting map M⁻¹ of a preparation network. Row 2n of the result
/// recovers x of input mode n and row 2n+1 its p (0-based), i.e. rows
/// {·}_{2n+1}, {·}_{2n+2} in 1-based indexing.
inline SymplecticTransform untwist(const SymplecticTransform& network) { return inverse(network); }

inline CovarianceMatrix apply(const SymplecticTransform& m, const CovarianceMatrix& cov) {
  if (m.n_modes() != cov.n_modes()) throw Error(ErrorCode::kDimensionMismatch, "mode count mismatch");
  return CovarianceMatrix(m.matrix() * cov.matrix() * m.matrix().transpose());
}

/// Beam-splitter loss on `mode`: its block ↦ t²Σ + (1−t²)/2·I, cross blocks ↦ t·Σ.
inline CovarianceMatrix loss_cov(const CovarianceMatrix& cov, double t, int mode = 0) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kInvalidTransmissivity, "transmissivity outside [0,1]");
  detail::require_mode(mode, cov.n_modes());
  Eigen::MatrixXd s = cov.matrix();
  const int n = static_cast<int>(s.rows());
  for (int i = 0; i < n; ++i) {
    const bool in_i = i / 2 == mode;
    for (int j = 0; j < n; ++j) {
      const bool in_j = j / 2 == mode;
      if (in_i && in_j) {
        s(i, j) = t * t * s(i, j) + (i == j ? 0.5 * (1.0 - t * t) : 0.0);
      } else if (in_i || in_j) {
        s(i, j) *= t;
      }
    }
  }
  return CovarianceMatrix(s);
}

/// ν = 10·log₁₀(V / (1/2)).
inline double db(double variance) {
  if (!(variance > 0.0)) throw Error(ErrorCode::kInvalidVariance, "variance must be positive");
  return 10.0 * std::log10(variance / 0.5);
}

inline double db_inverse(double decibels) { return 0.5 * std::pow(10.0, decibels / 10.0); }

/// nᵀ Σ n.
inline double gaussian_nullifier_variance(const CovarianceMatrix& cov, const LinearNullifier& nullifier) {
  if (cov.n_modes() != nullifier.n_modes()) throw Error(ErrorCode::kDimensionMismatch, "mode count mismatch");
  const Eigen::VectorXd& n = nullifier.coefficients();
  return n.dot(cov.matrix() * n);
}

/// Two-mode passive network: phase on mode 2, balanced-or-not beam splitter,
/// phase on mode 2. With angles (−π/2, −π/2) and t = 1/√2 this is the
/// two-node cluster map x₁′=(x₁+p₂)/√2, p₁′=(p₁−x₂)/√2, x₂′=(−x₂−p₁)/√2,
/// p₂′=(x₁−p₂)/√2.
inline SymplecticTransform two_mode_network_sym(double phase_before, double t, double phase_after) {
  return compose(phase_sym(phase_after, 2, 1), compose(bs_sym(t), phase_sym(phase_before, 2, 1)));
}

inline constexpr double kClusterPhaseBefore = -1.5707963267948966;
inline constexpr double kClusterPhaseAfter = -1.5707963267948966;

}  // namespace cvnull
