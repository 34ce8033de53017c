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

#include "cvnull/symplectic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cvnull/fock.hpp"
#include "gtest/gtest.h"

namespace cvnull {
namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

bool is_symplectic(const SymplecticTransform& m) {
  const auto omega = symplectic_form(m.n_modes());
  return max_abs(m.matrix() * omega * m.matrix().transpose() - omega) < 1e-10;
}

// Two-node cluster: squeezed inputs then the passive network.
CovarianceMatrix two_node_cluster_cov(double r) {
  const double g = std::exp(-2.0 * r);  // x = e^{−r}x⁽⁰⁾, p = e^{r}p⁽⁰⁾
  const auto squeezers = compose(squeeze_sym(g, 2, 0), squeeze_sym(g, 2, 1));
  const auto network = two_mode_network_sym(kClusterPhaseBefore, 1.0 / std::numbers::sqrt2, kClusterPhaseAfter);
  return apply(compose(network, squeezers), vacuum_cov(2));
}

TEST(Vacuum, Covariance) {
  EXPECT_EQ(vacuum_cov(1).matrix(), 0.5 * Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(vacuum_cov(2).matrix(), 0.5 * Eigen::MatrixXd::Identity(4, 4));
  EXPECT_NEAR((2.0 * vacuum_cov(3).matrix()).determinant(), 1.0, 1e-15);
}

TEST(Transforms, Constructors) {
  EXPECT_EQ(squeeze_sym(1.0).matrix(), Eigen::MatrixXd::Identity(2, 2));
  const auto sq = apply(squeeze_sym(0.3), vacuum_cov(1));
  EXPECT_NEAR(sq.matrix()(0, 0), 0.3 / 2, 1e-15);
  EXPECT_NEAR(sq.matrix()(1, 1), 1.0 / (2 * 0.3), 1e-15);
  EXPECT_THROW(squeeze_sym(0.0), Error);
  EXPECT_THROW(squeeze_sym(-1.0), Error);
  for (const auto& m : {squeeze_sym(2.5, 3, 1), phase_sym(0.7, 3, 2), bs_sym(0.3, 3, 0, 2),
                        two_mode_network_sym(0.1, 0.6, -0.4)}) {
    EXPECT_TRUE(is_symplectic(m));
    EXPECT_LT(max_abs(inverse(m).matrix() * m.matrix() - Eigen::MatrixXd::Identity(m.matrix().rows(), m.matrix().rows())),
              1e-10);
  }
  EXPECT_THROW(SymplecticTransform(Eigen::MatrixXd::Identity(2, 2) * 2.0), Error);
}

TEST(Transforms, ClusterNetworkMatchesReferenceMap) {
  const auto m = two_mode_network_sym(kClusterPhaseBefore, 1.0 / std::numbers::sqrt2, kClusterPhaseAfter);
  Eigen::Matrix4d expect;
  const double s = 1.0 / std::numbers::sqrt2;
  // rows: x₁′, p₁′, x₂′, p₂′ over columns x₁, p₁, x₂, p₂
  expect << s, 0, 0, s,
            0, s, -s, 0,
            0, -s, -s, 0,
            s, 0, 0, -s;
  EXPECT_LT(max_abs(m.matrix() - expect), 1e-15);
}

TEST(Transforms, BeamSplitterInverseNegatesReflection) {
  const double t = 0.37;
  const auto bs = bs_sym(t);
  Eigen::MatrixXd flipped = bs.matrix();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i / 2 != j / 2) flipped(i, j) = -flipped(i, j);
  EXPECT_LT(max_abs(inverse(bs).matrix() - flipped), 1e-15);
  EXPECT_LT(max_abs(compose(SymplecticTransform(flipped), bs).matrix() - Eigen::MatrixXd::Identity(4, 4)), 1e-15);
}

TEST(Untwist, RecoversInputQuadratures) {
  EXPECT_EQ(untwist(SymplecticTransform::identity(2)).matrix(), Eigen::MatrixXd::Identity(4, 4));
  const auto bs = bs_sym(0.8);
  EXPECT_LT(max_abs(compose(untwist(bs), bs).matrix() - Eigen::MatrixXd::Identity(4, 4)), 1e-15);
  const auto net = two_mode_network_sym(kClusterPhaseBefore, 1.0 / std::numbers::sqrt2, kClusterPhaseAfter);
  const auto back = untwist(net);
  // rows 1 and 3 of M⁻¹ acting on measured quadratures give p₁, p₂ of the inputs
  const Eigen::MatrixXd id = back.matrix() * net.matrix();
  EXPECT_LT(max_abs(id - Eigen::MatrixXd::Identity(4, 4)), 1e-15);
  // N₁ = p₁′ − x₂′ equals √2·p₁
  Eigen::Vector4d n1(0, 1, -1, 0);
  const Eigen::Vector4d in_terms_of_input = net.matrix().transpose() * n1;
  EXPECT_LT((in_terms_of_input - Eigen::Vector4d(0, std::numbers::sqrt2, 0, 0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Loss, CovarianceFormula) {
  const double g = 0.4;
  const double t = 0.8;
  const auto lossy = loss_cov(apply(squeeze_sym(g), vacuum_cov(1)), t);
  EXPECT_NEAR(lossy.matrix()(0, 0), t * t * g / 2 + (1 - t * t) / 2, 1e-15);
  EXPECT_NEAR(lossy.matrix()(1, 1), t * t / (2 * g) + (1 - t * t) / 2, 1e-15);
  EXPECT_EQ(loss_cov(vacuum_cov(1), 1.0).matrix(), vacuum_cov(1).matrix());

  // cross blocks scale by t
  const auto cluster = two_node_cluster_cov(-0.5);
  const auto lossy2 = loss_cov(cluster, t, 1);
  EXPECT_NEAR(lossy2.matrix()(0, 3), t * cluster.matrix()(0, 3), 1e-15);
  EXPECT_NEAR(lossy2.matrix()(0, 0), cluster.matrix()(0, 0), 1e-15);
}

TEST(Decibels, Conversions) {
  EXPECT_DOUBLE_EQ(db(0.5), 0.0);
  EXPECT_NEAR(db(5.0), 10.0, 1e-14);
  EXPECT_NEAR(db_inverse(-2.0), 0.5 * std::pow(10.0, -0.2), 1e-16);
  for (double v : {0.01, 0.3, 0.5, 2.0, 77.0}) EXPECT_NEAR(db_inverse(db(v)), v, 1e-12 * v);
  try {
    db(0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidVariance);
  }
}

TEST(GaussianNullifier, TwoNodeExample) {
  const LinearNullifier n1(Eigen::Vector4d(0, 1, -1, 0));
  const LinearNullifier n2(Eigen::Vector4d(-1, 0, 0, 1));
  EXPECT_NEAR(gaussian_nullifier_variance(two_node_cluster_cov(0.0), n1), 1.0, 1e-15);
  EXPECT_NEAR(gaussian_nullifier_variance(two_node_cluster_cov(-1.0), n1), std::exp(-2.0), 1e-12);
  EXPECT_NEAR(gaussian_nullifier_variance(two_node_cluster_cov(-1.0), n2), std::exp(-2.0), 1e-12);
  EXPECT_LT(gaussian_nullifier_variance(two_node_cluster_cov(-5.0), n1), 1e-4);
  EXPECT_THROW(LinearNullifier(Eigen::Vector2d(0, 0)), Error);
}

TEST(Properties, VarianceInvariantUnderSymplecticChangeOfFrame) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = compose(two_mode_network_sym(u(rng), 0.5 + 0.4 * u(rng), u(rng)),
                           compose(squeeze_sym(1.0 + 0.5 * u(rng), 2, 0), squeeze_sym(1.0 + 0.5 * u(rng), 2, 1)));
    const auto cov = apply(compose(bs_sym(0.7), squeeze_sym(0.3, 2, 1)), vacuum_cov(2));
    const Eigen::Vector4d n(u(rng), u(rng), u(rng), u(rng));
    const Eigen::Vector4d n_transformed = inverse(m).matrix().transpose() * n;
    EXPECT_NEAR(gaussian_nullifier_variance(cov, LinearNullifier(n)),
                gaussian_nullifier_variance(apply(m, cov), LinearNullifier(n_transformed)), 1e-12);
  }
}

TEST(Properties, CovarianceRejectsUncertaintyViolation) {
  Eigen::Matrix2d bad;
  bad << 0.1, 0.0, 0.0, 0.1;
  EXPECT_THROW(CovarianceMatrix{bad}, Error);
}

// Fock–Gaussian consistency at D=40: first and second moments of a state
// built from gates match the covariance pipeline.
TEST(Properties, FockMomentsMatchCovariancePipeline) {
  const int d = 40;
  const double r = 0.3;
  const double theta = 0.4;
  const Complex alpha(0.5, -0.3);
  auto rho = DensityOperator::vacuum(d);
  rho = apply_gate(Squeeze{r}, rho);
  rho = apply_gate(PhaseShift{theta}, rho);
  rho = apply_gate(Displace{alpha}, rho);
  rho = loss_channel(rho, 0.9);

  const auto cov = loss_cov(apply(compose(phase_sym(theta), squeeze_sym(std::exp(-2 * r))), vacuum_cov(1)), 0.9);
  const auto x = quadrature_operator(0.0, d);
  const auto p = quadrature_operator(std::numbers::pi / 2, d);
  const double mx = expectation(rho, x);
  const double mp = expectation(rho, p);
  EXPECT_NEAR(mx, 0.9 * std::numbers::sqrt2 * alpha.real(), 1e-6);
  EXPECT_NEAR(mp, 0.9 * std::numbers::sqrt2 * alpha.imag(), 1e-6);
  EXPECT_NEAR(expectation(rho, FockOperator(x.matrix() * x.matrix())) - mx * mx, cov.matrix()(0, 0), 1e-6);
  EXPECT_NEAR(expectation(rho, FockOperator(p.matrix() * p.matrix())) - mp * mp, cov.matrix()(1, 1), 1e-6);
  const CMatrix sym = 0.5 * (x.matrix() * p.matrix() + p.matrix() * x.matrix());
  EXPECT_NEAR(expectation(rho, FockOperator::hermitian(sym)) - mx * mp, cov.matrix()(0, 1), 1e-6);
}

}  // namespace
}  // namespace cvnull
