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

#include "cvnull/nullifier.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

namespace cvnull {
namespace {

constexpr double kPi = std::numbers::pi;

double rel_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

DensityOperator random_state(std::mt19937_64& rng, int dim, int support) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g = CMatrix::Zero(dim, dim);
  for (int i = 0; i < support; ++i)
    for (int j = 0; j < support; ++j) g(i, j) = Complex(n(rng), n(rng));
  return DensityOperator::normalized(g * g.adjoint());
}

DensityOperator kitten(double r, int dim) { return apply_gate(Squeeze{r}, DensityOperator::fock(1, dim)); }

double coefficient_at(const NullifierPolynomial& poly, double theta, int power) {
  for (const auto& t : poly.terms())
    if (t.power == power && std::abs(t.theta - theta) < 1e-12) return t.coefficient;
  return 0.0;
}

TEST(Presets, Parse) {
  EXPECT_EQ(parse_preset("eq15"), Preset::kEq15);
  EXPECT_EQ(parse_preset("eq16"), Preset::kEq16);
  EXPECT_EQ(to_string(Preset::kEq16), "eq16");
  EXPECT_THROW(parse_preset("eq17"), Error);
}

TEST(Polynomial, QuarterPiPresetAtUnitFrame) {
  const auto poly = kitten_nullifier_poly(1.0, Preset::kEq15);
  EXPECT_NEAR(coefficient_at(poly, 0.0, 4), 1.0 / 6, 1e-14);
  EXPECT_NEAR(coefficient_at(poly, kPi / 2, 4), 1.0 / 6, 1e-14);
  EXPECT_NEAR(coefficient_at(poly, kPi / 4, 4), 1.0 / 6, 1e-14);
  EXPECT_NEAR(coefficient_at(poly, -kPi / 4, 4), 1.0 / 6, 1e-14);
  EXPECT_NEAR(coefficient_at(poly, 0.0, 2), -1.5, 1e-14);
  EXPECT_NEAR(coefficient_at(poly, kPi / 2, 2), -1.5, 1e-14);
  EXPECT_DOUBLE_EQ(poly.constant(), 2.0);
  EXPECT_EQ(poly.phases().size(), 4u);
}

TEST(Polynomial, QuarterPiPresetForGeneralFrame) {
  for (double g : {0.5, 1.3, 2.0}) {
    const auto poly = kitten_nullifier_poly(g, Preset::kEq15);
    const double g4 = std::pow(g, 4);
    EXPECT_NEAR(coefficient_at(poly, 0.0, 4), g4 / 4 - 1.0 / 12, 1e-13);
    EXPECT_NEAR(coefficient_at(poly, kPi / 2, 4), 1 / (4 * g4) - 1.0 / 12, 1e-13);
    EXPECT_NEAR(coefficient_at(poly, kPi / 4, 4), 1.0 / 6, 1e-13);
    EXPECT_NEAR(coefficient_at(poly, -kPi / 4, 4), 1.0 / 6, 1e-13);
    EXPECT_NEAR(coefficient_at(poly, 0.0, 2), -1.5 * g * g, 1e-13);
    EXPECT_NEAR(coefficient_at(poly, kPi / 2, 2), -1.5 / (g * g), 1e-13);
  }
}

TEST(Polynomial, SixthPiPresetAtUnitFrame) {
  const auto poly = kitten_nullifier_poly(1.0, Preset::kEq16);
  EXPECT_NEAR(coefficient_at(poly, kPi / 6, 4), 2.0 / 9, 1e-13);
  EXPECT_NEAR(coefficient_at(poly, 5 * kPi / 6, 4), 2.0 / 9, 1e-13);
  EXPECT_NEAR(coefficient_at(poly, kPi / 2, 4), 2.0 / 9, 1e-13);
  EXPECT_NEAR(coefficient_at(poly, 0.0, 4), 0.0, 1e-13);
}

TEST(Representations, FockMatchesPolynomial) {
  const int d = 30;
  for (Preset preset : {Preset::kEq15, Preset::kEq16}) {
    for (double g : {0.5, 1.0, 1.7}) {
      EXPECT_LT(rel_diff(poly_operator(kitten_nullifier_poly(g, preset), d).matrix(),
                         kitten_nullifier_fock(g, d).matrix()),
                1e-10)
          << to_string(preset) << " g=" << g;
    }
  }
}

TEST(Representations, RandomStatesAgree) {
  std::mt19937_64 rng(11);
  const int d = 30;
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = random_state(rng, d, 8);
    for (Preset preset : {Preset::kEq15, Preset::kEq16}) {
      for (double g : {0.5, 1.0, 1.7}) {
        const double fock = expectation(rho, kitten_nullifier_fock(g, d));
        EXPECT_NEAR(eval_poly_on_state(kitten_nullifier_poly(g, preset), rho), fock, 1e-9 * std::max(1.0, fock));
      }
    }
  }
}

TEST(Representations, WeylFormMatchesFock) {
  const int d = 20;
  for (double g : {0.7, 1.0, 1.4}) {
    const auto form = kitten_weyl_form(g);
    CMatrix sum = form.constant * CMatrix::Identity(d, d);
    for (int l = 0; l <= 4; ++l)
      if (form.quartic(l) != 0.0) sum += form.quartic(l) * weyl_operator_oracle({4 - l, l}, d).matrix();
    for (int l = 0; l <= 2; ++l)
      if (form.quadratic(l) != 0.0) sum += form.quadratic(l) * weyl_operator_oracle({2 - l, l}, d).matrix();
    EXPECT_LT(rel_diff(sum, kitten_nullifier_fock(g, d).matrix()), 1e-12);
  }
}

TEST(Kitten, GroundStateHasZeroNullifier) {
  const int d = 60;
  for (double g : {0.6, 1.0, 1.7}) {
    const auto rho = kitten(kitten_r_for_frame(g), d);
    EXPECT_NEAR(expectation(rho, kitten_nullifier_fock(g, d)), 0.0, 1e-8);
  }
  EXPECT_NEAR(kitten_frame_for_r(kitten_r_for_frame(1.3)), 1.3, 1e-15);
  EXPECT_NEAR(expectation(DensityOperator::vacuum(10), kitten_nullifier_fock(1.0, 10)), 1.0, 1e-14);
  EXPECT_THROW(kitten_nullifier_fock(0.0, 10), Error);
}

TEST(Kitten, NullifierIsPositive) {
  const int d = 25;
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<CMatrix>(kitten_nullifier_fock(1.4, d).matrix()).eigenvalues();
  // the cutoff breaks exact positivity only through the corner block
  EXPECT_GT(ev.head(d - 4).minCoeff(), -1e-9);
}

TEST(Heterodyne, AntinormalFormEqualsNumberOperatorForm) {
  const int d = 20;
  EXPECT_LT(rel_diff(antinormal_observable(kitten_heterodyne_form(), d).matrix(),
                     kitten_nullifier_fock(1.0, d).matrix()),
            1e-14);
  EXPECT_NEAR(heterodyne_eval(DensityOperator::vacuum(d)), 1.0, 1e-14);
  EXPECT_NEAR(heterodyne_eval(DensityOperator::fock(1, d)), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(kitten_heterodyne_form()(Complex(1.0, 1.0)), 4.0 - 10.0 + 4.0);
}

TEST(Heterodyne, QIntegralMatchesAntinormalMoments) {
  const int d = 15;
  auto rho = apply_gate(Displace{Complex(0.4, 0.2)}, apply_gate(Squeeze{0.2}, DensityOperator::fock(1, d)));
  rho = DensityOperator::normalized(rho.matrix());
  EXPECT_NEAR(heterodyne_eval_integral(rho, kitten_heterodyne_form(), {.radius = -1.0, .radial_points = 400}),
              heterodyne_eval(rho), 1e-6);
  try {
    heterodyne_eval_integral(DensityOperator::fock(3, d), kitten_heterodyne_form(), {.radius = 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGridTooSmall);
  }
}

TEST(Heterodyne, SampleMean) {
  EXPECT_DOUBLE_EQ(heterodyne_eval(std::vector<Complex>{{0.0, 0.0}, {2.0, 0.0}}), (4.0 + 0.0) / 2);
  EXPECT_THROW(heterodyne_eval(std::vector<Complex>{}), Error);
}

TEST(Graph, TwoNodeNullifiers) {
  const auto n = gaussian_nullifiers_for_graph({{0, 1}, {1, 0}});
  ASSERT_EQ(n.size(), 2u);
  EXPECT_EQ(n[0].coefficients(), Eigen::Vector4d(0, 1, -1, 0));
  EXPECT_EQ(n[1].coefficients(), Eigen::Vector4d(-1, 0, 0, 1));
  EXPECT_THROW(gaussian_nullifiers_for_graph({{0, 1}, {0, 0}}), Error);
  EXPECT_THROW(gaussian_nullifiers_for_graph({{1}}), Error);
  EXPECT_THROW(gaussian_nullifiers_for_graph({}), Error);
}

TEST(Untwist, TwoKittensThroughBalancedSplitter) {
  const int d = 16;
  const double r = 0.2;
  const auto in = tensor(kitten(r, d), kitten(r, d));
  const auto u = gate_unitary(BeamSplitter{1.0 / std::numbers::sqrt2}, d);
  const auto cluster = apply_unitary(u, in);
  const auto op = kitten_nullifier_fock(kitten_frame_for_r(r), d);
  for (int mode : {0, 1}) {
    EXPECT_NEAR(expectation(cluster, untwist_nullifier(op, u, mode)), 0.0, 1e-6);
    // without untwisting the nullifier sees a mixed, non-kitten reduced state
    EXPECT_GT(expectation(cluster, embed(op, mode)), 0.05);
  }
}

TEST(Untwist, KittenWithVacuumEqualsSingleModeValue) {
  const int d = 16;
  const auto single = apply_gate(Displace{Complex(0.1, 0.0)}, kitten(0.15, d));
  const auto in = tensor(single, DensityOperator::vacuum(d));
  const auto u = gate_unitary(BeamSplitter{0.6}, d);
  const auto op = kitten_nullifier_fock(1.1, d);
  EXPECT_NEAR(expectation(apply_unitary(u, in), untwist_nullifier(op, u, 0)), expectation(single, op), 1e-6);
}

// Passive networks cannot push a Gaussian input below the Gaussian bound,
// even when the untwisting network differs from the preparation.
TEST(Untwist, GaussianInputsStayAboveBound) {
  const int d = 16;
  const auto a = apply_gate(Displace{Complex(0.7, 0.0)}, apply_gate(Squeeze{0.2}, DensityOperator::vacuum(d)));
  const auto b = apply_gate(Squeeze{-0.1}, DensityOperator::vacuum(d));
  const auto u = gate_unitary(BeamSplitter{1.0 / std::numbers::sqrt2}, d);
  const auto cluster = apply_unitary(u, tensor(a, b));
  const auto op = kitten_nullifier_fock(1.0, d);
  for (double t : {0.6, 1.0 / std::numbers::sqrt2, 0.8}) {
    const auto u_assumed = gate_unitary(BeamSplitter{t}, d);
    EXPECT_GT(expectation(cluster, untwist_nullifier(op, u_assumed, 0)), 0.611 - 1e-3);
  }
  EXPECT_THROW(untwist_nullifier(kitten_nullifier_fock(1.0, 10), u, 0), Error);
}

}  // namespace
}  // namespace cvnull
