// Copyright 2026 The Dissim Authors
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

#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "dissim/amplitude.hpp"

using namespace dissim;

namespace {

LinearLindblad collective_loss(double rate, std::vector<Complex> cs) {
  Vector v(static_cast<Index>(cs.size()));
  for (size_t i = 0; i < cs.size(); ++i) v[static_cast<Index>(i)] = cs[i];
  return LinearLindblad(rate, std::move(v));
}

// Closed form of the two-mode dissipative-coupler map in the long-time
// limit: 1/(1+d^2) [[d^2, -d], [-d, 1]].
Matrix coupler_limit(double delta) {
  Matrix s(2, 2);
  s << delta * delta, -delta, -delta, 1.0;
  return s / (1.0 + delta * delta);
}

CouplingMatrix coupler(double delta, double rate = 1.0) {
  return coupling_matrix({collective_loss(rate, {1.0, delta})}, 2);
}

}  // namespace

TEST_CASE("coupling matrix from collective loss") {
  const double delta = 0.7;
  const Matrix m = coupler(delta, 2.0).entries();
  Matrix expected(2, 2);
  expected << 1.0, delta, delta, delta * delta;
  expected *= 2.0;
  CHECK((m - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  // no terms -> zero matrix
  CHECK(coupling_matrix({}, 3).entries().cwiseAbs().maxCoeff() == 0.0);

  // pair of three-mode chain couplers
  const double y = -0.4, z = 0.8;
  const Matrix m3 = coupling_matrix({collective_loss(1.0, {1.0, y, 0.0}),
                                     collective_loss(1.0, {0.0, 1.0, z})},
                                    3)
                        .entries();
  Matrix e3(3, 3);
  e3 << 1, y, 0, y, y * y + 1, z, 0, z, z * z;
  CHECK((m3 - e3).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(coupling_matrix({collective_loss(1.0, {1.0, 0.5})}, 3),
                  std::invalid_argument);
}

TEST_CASE("propagate") {
  const CouplingMatrix single = coupling_matrix({collective_loss(1.0, {1.0})}, 1);
  Vector alpha(1);
  alpha << 1.0;
  CHECK(std::abs(propagate(alpha, single, 0.0)[0] - 1.0) < 1e-15);
  CHECK(std::abs(propagate(alpha, single, 2.0)[0] - std::exp(-2.0)) < 1e-12);

  // dark input (delta, -1) is annihilated by L = a + delta b and frozen
  const double delta = -0.5;
  Vector dark(2);
  dark << delta, -1.0;
  const Vector out = propagate(dark, coupler(delta), 7.0);
  CHECK((out - dark).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("asymptotic scattering matrix") {
  // delta = -0.5 closed form
  const Matrix s = asymptotic_scatter(coupler(-0.5)).entries();
  Matrix expected(2, 2);
  expected << 0.2, 0.4, 0.4, 0.8;
  CHECK((s - expected).cwiseAbs().maxCoeff() < 1e-12);

  // delta = 0: mode a fully damped, mode b dark
  const Matrix s0 = asymptotic_scatter(coupler(0.0)).entries();
  CHECK(std::abs(s0(0, 0)) < 1e-12);
  CHECK(std::abs(s0(1, 1) - 1.0) < 1e-12);
  CHECK(std::abs(s0(0, 1)) < 1e-12);

  // non-PSD coupling rejected
  Matrix bad(2, 2);
  bad << -1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(asymptotic_scatter(CouplingMatrix(bad)), std::invalid_argument);
}

TEST_CASE("three-mode chain projector") {
  const double y = -0.9, z = -0.1;
  const CouplingMatrix m = coupling_matrix(
      {collective_loss(1.0, {1.0, y, 0.0}), collective_loss(1.0, {0.0, 1.0, z})}, 3);
  const Matrix s = asymptotic_scatter(m).entries();

  Eigen::Vector3d v(y * z, -z, 1.0);
  const double f = z * z * (1.0 + y * y) + 1.0;
  CHECK(f == doctest::Approx(1.0181));
  const Eigen::Matrix3d expected = (v * v.transpose()) / f;
  CHECK((s - expected.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);

  // The rank-one projector carries +yz in the corner entries; a sign
  // convention worth pinning because it is easy to get wrong.
  CHECK(s(0, 2).real() == doctest::Approx(y * z / f));
  CHECK(s(2, 0).real() == doctest::Approx(y * z / f));
}

TEST_CASE("projector law and commutation with finite-time maps") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const CouplingMatrix m = coupler(u(rng));
    const Matrix p = asymptotic_scatter(m).entries();
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
    const double t = 0.5 + 2.0 * std::abs(u(rng));
    const Matrix e = (-m.entries() * t).exp();
    CHECK((p * e - e * p).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("two-part composition and asymmetry ratios") {
  const ScatteringMatrix s1{coupler_limit(-0.5)};
  const ScatteringMatrix s2{coupler_limit(-1.0)};

  // 2->1 traversal composes to the closed form
  // (1+d1 d2)/((1+d1^2)(1+d2^2)) [[d1 d2, -d1], [-d2, 1]].
  const ScatteringMatrix back = compose({s2, s1});
  Matrix expected(2, 2);
  expected << 0.3, 0.3, 0.6, 0.6;
  CHECK((back.entries() - expected).cwiseAbs().maxCoeff() < 1e-12);

  const ScatteringMatrix fwd = compose({s1, s2});
  Matrix expected_fwd(2, 2);
  expected_fwd << 0.3, 0.6, 0.3, 0.6;
  CHECK((fwd.entries() - expected_fwd).cwiseAbs().maxCoeff() < 1e-12);

  // off-diagonal ratio |delta1/delta2| both within one matrix and across
  // the two traversal orders
  CHECK(asymmetry_ratio(back, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(back.entries()(0, 1)) / std::abs(fwd.entries()(0, 1)) ==
        doctest::Approx(0.5).epsilon(1e-12));

  // identity parts compose to the identity
  const ScatteringMatrix id{Matrix::Identity(2, 2)};
  CHECK((compose({id, id}).entries() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);

  // uncorrelated loss followed by the coupler reproduces the printed
  // element pattern 1/(1+d^2) [[T_A d^2, -T_B d], [-d T_A, T_B]]
  const double ta = 0.3, tb = 0.9, d2 = -1.3;
  const ScatteringMatrix staged = compose({loss_diag({ta, tb}), ScatteringMatrix{coupler_limit(d2)}});
  Matrix eq10(2, 2);
  eq10 << ta * d2 * d2, -tb * d2, -d2 * ta, tb;
  eq10 /= (1.0 + d2 * d2);
  CHECK((staged.entries() - eq10).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(compose({s1, ScatteringMatrix{Matrix::Identity(3, 3)}}),
                  std::invalid_argument);
}

TEST_CASE("asymmetry ratio identity over random couplers") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  while (done < 100) {
    const double d1 = u(rng), d2 = u(rng);
    if (std::abs(d1) < 0.05 || std::abs(d2) < 0.05 || std::abs(1.0 + d1 * d2) < 0.05)
      continue;
    const ScatteringMatrix onetwo =
        compose({ScatteringMatrix{coupler_limit(d2)}, ScatteringMatrix{coupler_limit(d1)}});
    const double expected = std::abs(d1 / d2);
    CHECK(asymmetry_ratio(onetwo, 0, 1) == doctest::Approx(expected).epsilon(1e-12));
    ++done;
  }
}

TEST_CASE("three-mode ratios at the mirrored working point") {
  auto chain_limit = [](double y, double z) {
    Eigen::Vector3d v(y * z, -z, 1.0);
    const Eigen::Matrix3d p = v * v.transpose() / (z * z * (1.0 + y * y) + 1.0);
    return ScatteringMatrix{p.cast<Complex>()};
  };
  // y1 = -z2 = -0.9, y2 = -z1 = 0.1
  const ScatteringMatrix s =
      compose({chain_limit(0.1, 0.9), chain_limit(-0.9, -0.1)});
  CHECK(asymmetry_ratio(s, 0, 1) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(asymmetry_ratio(s, 1, 2) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(asymmetry_ratio(s, 0, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("three-mode ratio identities over random parameters") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto chain_limit = [](double y, double z) {
    Eigen::Vector3d v(y * z, -z, 1.0);
    const Eigen::Matrix3d p = v * v.transpose() / (z * z * (1.0 + y * y) + 1.0);
    return ScatteringMatrix{p.cast<Complex>()};
  };
  int done = 0;
  while (done < 100) {
    const double y1 = u(rng), z1 = u(rng), y2 = u(rng), z2 = u(rng);
    if (std::min({std::abs(y1), std::abs(z1), std::abs(y2), std::abs(z2)}) < 0.05)
      continue;
    // S1 S2 as a literal product = traverse part 2 first
    const ScatteringMatrix s = compose({chain_limit(y2, z2), chain_limit(y1, z1)});
    CHECK(asymmetry_ratio(s, 0, 1) == doctest::Approx(std::abs(y1 / y2)).epsilon(1e-10));
    CHECK(asymmetry_ratio(s, 1, 2) == doctest::Approx(std::abs(z1 / z2)).epsilon(1e-10));
    CHECK(asymmetry_ratio(s, 0, 2) ==
          doctest::Approx(std::abs(y1 * z1 / (y2 * z2))).epsilon(1e-10));
    ++done;
  }
}

TEST_CASE("unidirectional transmission of the odd input") {
  const ScatteringMatrix s1{coupler_limit(-0.5)};
  const ScatteringMatrix s2{coupler_limit(-1.0)};
  Vector in(2);
  in << 1.0, -1.0;

  const Vector fwd = compose({s1, s2}).entries() * in;
  CHECK(std::abs(fwd[0] - Complex(-0.3, 0.0)) < 1e-12);
  CHECK(std::abs(fwd[1] - Complex(-0.3, 0.0)) < 1e-12);

  const Vector bwd = compose({s2, s1}).entries() * in;
  CHECK(std::abs(bwd[0]) < 1e-12);
  CHECK(std::abs(bwd[1]) < 1e-12);
}

TEST_CASE("asymmetry ratio edge cases") {
  Matrix m(2, 2);
  m << 0.5, 0.25, 0.0, 0.5;
  const ScatteringMatrix s{m};
  CHECK(asymmetry_ratio(s, 0, 1) == std::numeric_limits<double>::infinity());
  CHECK(asymmetry_ratio(s, 1, 0) == 0.0);

  const ScatteringMatrix sym{coupler_limit(0.8)};
  CHECK(asymmetry_ratio(sym, 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("loss diag") {
  CHECK((loss_diag({1.0, 1.0}).entries() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);
  const Matrix s = loss_diag({0.0, 1.0}).entries();
  CHECK(s(0, 0).real() == 0.0);
  CHECK(s(1, 1).real() == 1.0);
  CHECK_THROWS_AS(loss_diag({1.2}), std::invalid_argument);
  CHECK_THROWS_AS(loss_diag({-0.1}), std::invalid_argument);

  // energy asymmetry of loss followed by a coupler is (T_A/T_B)^2
  const ScatteringMatrix staged =
      compose({loss_diag({0.5, 1.0}), ScatteringMatrix{coupler_limit(-1.0)}});
  const double r = asymmetry_ratio(staged, 1, 0);
  CHECK(r * r == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("gauge-equivalence check") {
  // symmetric projector: already reciprocal
  const GaugeCheckResult direct = reciprocal_mod_gauge(ScatteringMatrix{coupler_limit(-0.7)});
  CHECK(direct.reciprocal);

  // diagonal matrices are reciprocal
  CHECK(reciprocal_mod_gauge(loss_diag({0.3, 0.8})).reciprocal);

  // composed two-part device: |S_12| != |S_21|, witness (0, 1)
  const GaugeCheckResult broken = reciprocal_mod_gauge(
      compose({ScatteringMatrix{coupler_limit(-1.0)}, ScatteringMatrix{coupler_limit(-0.5)}}));
  CHECK_FALSE(broken.reciprocal);
  REQUIRE(broken.witness.has_value());
  CHECK(broken.witness->first == 0);
  CHECK(broken.witness->second == 1);

  // gauge-rotated symmetric matrix: asymmetric phases but equal moduli;
  // must be recognized as reciprocal and come with a fixing phase set
  Matrix base = coupler_limit(-0.6);
  Eigen::Vector2cd phases(std::polar(1.0, 0.4), std::polar(1.0, -1.1));
  Matrix rotated = phases.asDiagonal() * base;
  const ScatteringMatrix gauged{rotated};
  const GaugeCheckResult fixed = reciprocal_mod_gauge(gauged);
  CHECK(fixed.reciprocal);
  REQUIRE(fixed.output_phases.size() == 2);
  Eigen::Vector2cd undo(std::polar(1.0, fixed.output_phases[0]),
                        std::polar(1.0, fixed.output_phases[1]));
  const Matrix fixed_mat = undo.asDiagonal() * rotated;
  CHECK((fixed_mat - fixed_mat.transpose()).cwiseAbs().maxCoeff() < 1e-9);

  // 2x2 with equal moduli is always gauge-fixable (a single pair, no cycle)
  Matrix twisted(2, 2);
  twisted << 0.5, Complex(0.0, 0.25), 0.25, 0.5;
  CHECK(reciprocal_mod_gauge(ScatteringMatrix{twisted}).reciprocal);

  // three-mode cycle with a phase defect on one edge: equal moduli
  // everywhere, yet no phase assignment closes the triangle
  Matrix cycle = Matrix::Constant(3, 3, Complex(0.2, 0.0));
  cycle(0, 1) = std::polar(0.2, 1.0);
  const GaugeCheckResult broken_cycle = reciprocal_mod_gauge(ScatteringMatrix{cycle});
  CHECK_FALSE(broken_cycle.reciprocal);
  CHECK(broken_cycle.witness.has_value());
}

TEST_CASE("linear lindblad validation") {
  CHECK_THROWS_AS(collective_loss(-1.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(collective_loss(1.0, {0.0, 0.0}), std::invalid_argument);
}
