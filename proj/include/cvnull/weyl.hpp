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

// Decomposition of Weyl-symmetric quadrature monomials :x^m p^n:_W into
// powers of rotated quadratures X(θ_k)^{m+n}, which homodyne detection
// measures directly.
//
// Orientation: the system matrix has one row per monomial (row l ↔
// :x^{N−l} p^l:_W, N = m+n) and one column per angle. Rows hold
// cos^{N−l}θ sin^lθ; binomial factors are carried by the right-hand side.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "cvnull/error.hpp"
#include "cvnull/fock.hpp"

namespace cvnull {

inline constexpr int kMaxWeylDegree = 8;
inline constexpr double kAngleSeparationTolerance = 1e-9;
inline constexpr double kConditionGuard = 1e12;
inline constexpr double kSolveResidualTolerance = 1e-9;

struct WeylMonomial {
  int x_power = 0;
  int p_power = 0;

  int degree() const { return x_power + p_power; }
  auto operator<=>(const WeylMonomial&) const = default;
};

inline void validate(const WeylMonomial& mono, int max_degree = kMaxWeylDegree) {
  if (mono.x_power < 0 || mono.p_power < 0 || mono.degree() < 1 || mono.degree() > max_degree) {
    throw Error(ErrorCode::kInvalidParameter, "Weyl monomial powers must satisfy 1 <= m+n <= " +
                                                  std::to_string(max_degree));
  }
}

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

/// Distance between two angles modulo π (X(θ+π) = −X(θ), so powers of the two
/// are linearly dependent).
inline double angle_distance_mod_pi(double a, double b) {
  const double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

class AngleSet {
 public:
  explicit AngleSet(std::vector<double> angles) : angles_(std::move(angles)) {
    if (angles_.empty()) throw Error(ErrorCode::kInvalidParameter, "empty angle set");
    for (std::size_t i = 0; i < angles_.size(); ++i) {
      if (!std::isfinite(angles_[i])) throw Error(ErrorCode::kInvalidParameter, "non-finite angle");
      for (std::size_t j = 0; j < i; ++j) {
        if (angle_distance_mod_pi(angles_[i], angles_[j]) < kAngleSeparationTolerance) {
          throw Error(ErrorCode::kDegenerateAngles, "angles " + format_number(angles_[j]) + " and " +
                                                        format_number(angles_[i]) + " coincide modulo pi");
        }
      }
    }
  }
  const std::vector<double>& angles() const { return angles_; }
  std::size_t size() const { return angles_.size(); }

 private:
  std::vector<double> angles_;
};

/// Named angle presets for the quartic part of the kitten nullifier.
inline AngleSet preset_angles_eq15() {
  return AngleSet({0.0, std::numbers::pi / 4, std::numbers::pi / 2, -std::numbers::pi / 4});
}
inline AngleSet preset_angles_eq16() {
  return AngleSet({0.0, std::numbers::pi / 6, std::numbers::pi / 2, 5 * std::numbers::pi / 6});
}

/// X(θ)^n = Σ_l cos^{n−l}θ sin^lθ C(n,l) :x^{n−l}p^l:_W.
inline std::map<WeylMonomial, double> expand_power(double theta, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidParameter, "power must be >= 1");
  std::map<WeylMonomial, double> out;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (int l = 0; l <= n; ++l) {
    out[{n - l, l}] = std::pow(c, n - l) * std::pow(s, l) * binomial(n, l);
  }
  return out;
}

/// (n+1)×K matrix with entries cos^{n−l}θ_k sin^lθ_k. Throws
/// degenerate-angles when the columns are not numerically independent.
inline Eigen::MatrixXd build_system(const AngleSet& angles, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidParameter, "power must be >= 1");
  const int k_count = static_cast<int>(angles.size());
  if (k_count > n + 1) {
    throw Error(ErrorCode::kDegenerateAngles, std::to_string(k_count) + " angles exceed the " +
                                                  std::to_string(n + 1) + " independent powers of degree " +
                                                  std::to_string(n));
  }
  Eigen::MatrixXd c(n + 1, k_count);
  for (int k = 0; k < k_count; ++k) {
    const double cs = std::cos(angles.angles()[k]);
    const double sn = std::sin(angles.angles()[k]);
    for (int l = 0; l <= n; ++l) c(l, k) = std::pow(cs, n - l) * std::pow(sn, l);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
  const auto sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond <= kConditionGuard)) {
    throw Error(ErrorCode::kDegenerateAngles, "system condition number " + format_number(cond) + " above 1e12");
  }
  return c;
}

using CoefficientVector = Eigen::VectorXd;

/// Coefficients A_k with Σ_k A_k X(θ_k)^n = Σ_l w_l :x^{n−l}p^l:_W for the
/// given Weyl weights w (length n+1). Fewer than n+1 angles is allowed when
/// the target lies in their span; otherwise unreachable-monomial.
inline CoefficientVector solve_weyl_weights(const Eigen::VectorXd& weights, const AngleSet& angles) {
  const int n = static_cast<int>(weights.size()) - 1;
  const Eigen::MatrixXd c = build_system(angles, n);
  Eigen::VectorXd d(n + 1);
  for (int l = 0; l <= n; ++l) d(l) = weights(l) / binomial(n, l);
  const Eigen::VectorXd a = c.colPivHouseholderQr().solve(d);
  const double residual = (c * a - d).norm();
  if (!(residual <= kSolveResidualTolerance * std::max(1.0, d.norm()))) {
    throw Error(ErrorCode::kUnreachableMonomial,
                "target not in the span of the chosen angles (residual " + format_number(residual) + ")");
  }
  return a;
}

inline CoefficientVector solve_monomial(const WeylMonomial& target, const AngleSet& angles) {
  validate(target);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(target.degree() + 1);
  w(target.p_power) = 1.0;
  return solve_weyl_weights(w, angles);
}

/// Symmetrized product: the average over all distinct interleavings of m
/// factors x and n factors p, exact on the dim×dim block.
inline FockOperator weyl_operator_oracle(const WeylMonomial& mono, int dim) {
  validate(mono);
  detail::require_dim(dim);
  const int big = dim + mono.degree();
  const CMatrix x = detail::position(big);
  const CMatrix p = detail::momentum(big);
  std::vector<int> word(mono.degree(), 0);
  std::fill(word.begin() + mono.x_power, word.end(), 1);  // sorted: x's (0) then p's (1)
  CMatrix sum = CMatrix::Zero(big, big);
  int count = 0;
  do {
    CMatrix prod = CMatrix::Identity(big, big);
    for (int f : word) prod = prod * (f == 0 ? x : p);
    sum += prod;
    ++count;
  } while (std::next_permutation(word.begin(), word.end()));
  return FockOperator::hermitian(sum.topLeftCorner(dim, dim) / static_cast<double>(count));
}

/// Σ_k A_k X(θ_k)^n as a Fock operator.
inline FockOperator reconstruct_operator(const CoefficientVector& coefficients, const AngleSet& angles, int n,
                                         int dim) {
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    sum += coefficients(static_cast<Eigen::Index>(k)) * quadrature_power(angles.angles()[k], n, dim).matrix();
  }
  return FockOperator::hermitian(sum);
}

}  // namespace cvnull
